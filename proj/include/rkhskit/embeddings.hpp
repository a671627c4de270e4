#pragma once

#include "rkhskit/kernels.hpp"

namespace rkhs {

// An RKHS element written over sample atoms: m(.) = sum_i coeffs_i K(., x_i).
// The empirical mean embedding has coeffs = 1/N.
struct MeanEmbedding {
    Matrix points;   // N x d sample rows
    Vector coeffs;   // N
    KernelSpec kernel;

    double evaluate(const Vector& z) const;
    // <this, other> through the cross-Gram of the two atom sets.
    double inner(const MeanEmbedding& other) const;
    double norm_sq() const { return inner(*this); }
};

MeanEmbedding mean_embed(const KernelSpec& spec, const Matrix& samples);

// Gram-matrix representation of an empirical (cross-)covariance operator.
struct CovOperatorRep {
    Matrix gram_x;
    Matrix gram_y;
    bool centered = true;
    double reg_lambda = 0.0;
};

// <f, Sigma_hat_{YX} g> = (1/N) alpha^T K_x C_N K_y beta, the centering
// matrix dropped when the mean elements are known to vanish.
double cov_bilinear(const CovOperatorRep& rep, const Vector& alpha, const Vector& beta);

// Coefficient form of (Sigma_hat + lambda I)^{-1} applied to
// g = sum beta_i K(., x_i):  alpha = N (K + N lambda I)^{-1} beta.
Vector apply_reg_inverse(const Matrix& gram, double reg_lambda, const Vector& beta);

// Squared maximum mean discrepancy |mu_P - mu_Q|^2, biased V-statistic.
double mmd_sq(const KernelSpec& spec, const Matrix& samples_p, const Matrix& samples_q);

struct DeflectionResult {
    Vector detector;   // f maximizing the deflection
    double d_max;      // <mu1 - mu0, f>
};

// Finite-dimensional case with known noise covariance: f = Sigma0^{-1} (mu1 - mu0)
// (Tikhonov-shifted when reg_lambda > 0); throws when Sigma0 is singular at
// lambda = 0.  The detector is also the least-squares estimate of the
// centered likelihood ratio r = p1/p0 - 1 under the null — the same
// computation, not a separate operation.
DeflectionResult deflection_detector(const Vector& mu0, const Vector& mu1,
                                     const Matrix& sigma0, double reg_lambda = 0.0);

// Empirical case over N shared sample atoms: delta_coeffs are the expansion
// coefficients of mu1 - mu0, the detector comes back in the same expansion.
DeflectionResult deflection_detector(const Matrix& gram, const Vector& delta_coeffs,
                                     double reg_lambda);

}  // namespace rkhs
