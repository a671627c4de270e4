#pragma once

#include "rkhskit/kernels.hpp"

namespace rkhs {

// Kernel recursive least squares with approximate-linear-dependence
// sparsification.  Only K^{-1} on the dictionary and P = (A^T A)^{-1}
// are carried; the full projection matrix A is never materialized.
struct KrlsState {
    Matrix dict_points;   // retained inputs, one per row
    Matrix K_inv;         // inverse Gram on the dictionary
    Matrix P;             // (A^T A)^{-1}
    Vector alpha;
    double ald_threshold = 0.1;  // e0
    int n = 0;                   // samples seen
};

// Normalized kernel LMS with coherence sparsification.
struct KlmsState {
    Matrix dict_points;
    Vector alpha;
    double coherence_threshold = 0.5;  // e0 in (0, 1)
    double step_size = 0.09;           // lambda
    double stabilizer = 0.03;          // epsilon
    int n = 0;
};

struct AdaptiveStepResult {
    double prediction;  // computed before the state update
    double ald_error;   // e_n; coherence value for kLMS
};

KrlsState krls_init(const Vector& x1, double y1, const KernelSpec& spec,
                    double ald_threshold);

AdaptiveStepResult krls_step(KrlsState& state, const Vector& x, double y,
                             const KernelSpec& spec);

KlmsState klms_init(const Vector& x1, double y1, const KernelSpec& spec,
                    double coherence_threshold, double step_size, double stabilizer);

AdaptiveStepResult klms_step(KlmsState& state, const Vector& x, double y,
                             const KernelSpec& spec);

// y_hat = sum_i alpha_i K(x, d_i); pure read on either filter state.
double adaptive_predict(const Matrix& dict_points, const Vector& alpha,
                        const Vector& x, const KernelSpec& spec);

inline double adaptive_predict(const KrlsState& s, const Vector& x, const KernelSpec& spec) {
    return adaptive_predict(s.dict_points, s.alpha, x, spec);
}
inline double adaptive_predict(const KlmsState& s, const Vector& x, const KernelSpec& spec) {
    return adaptive_predict(s.dict_points, s.alpha, x, spec);
}

}  // namespace rkhs
