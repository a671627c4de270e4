#pragma once

#include <cstdint>

#include "rkhskit/kernels.hpp"

namespace rkhs {

// Precomputed training structure of the kernel Bayes filter.  Built from
// N+1 joint (state, observation) samples; the Gram matrices live on the
// first N, the shift matrix K_xx_plus pairs x_i with x_{j+1}.
struct KbrModel {
    Matrix train_x;       // (N+1) x dx
    Matrix train_y;       // (N+1) x dy
    Matrix gram_x;        // N x N on x_1..x_N
    Matrix gram_y;        // N x N on y_1..y_N
    Matrix gram_x_shift;  // N x N, entries K_x(x_i, x_{j+1})
    Matrix transition;    // (K_x + lambda I)^{-1} K_xx+ (K_x + lambda I)^{-1} K_x
    double reg_lambda;
    double reg_epsilon;
    KernelSpec spec_x;
    KernelSpec spec_y;

    Eigen::Index n() const { return gram_x.rows(); }
};

// Posterior embedding coefficients alpha^k over the N training states.
struct KbrState {
    Vector alpha;
    int step = 0;
};

KbrModel build_kbr_model(const Matrix& train_x, const Matrix& train_y,
                         const KernelSpec& spec_x, const KernelSpec& spec_y,
                         double reg_lambda, double reg_epsilon);

// alpha^{N+1} = (K_y + lambda I)^{-1} k_Y(y_first).
KbrState kbr_filter_init(const KbrModel& model, const Vector& y_first);

// One Bayes-rule update with the observation embedding vector k_Y fixed
// at mu = transition * alpha:  alpha' = L K_y ((K_y L)^2 + eps I)^{-1} L k.
Vector kbr_bayes_update(const KbrModel& model, const Vector& mu, const Vector& k_y_obs);

KbrState kbr_filter_step(const KbrModel& model, const KbrState& state, const Vector& y_obs);

// One-shot kernel Bayes rule: posterior embedding coefficients zeta over the
// joint y samples, for a prior sum_i gamma_i K_y(., prior_y_i) and query x.
Vector kbr_posterior(const Vector& prior_gamma, const Matrix& prior_y,
                     const Matrix& joint_x, const Matrix& joint_y,
                     const KernelSpec& spec_x, const KernelSpec& spec_y,
                     double reg_lambda, double reg_epsilon, const Vector& query_x);

struct PreimageResult {
    Vector point;
    bool converged = false;
    double residual = 0.0;  // |x - fixed_point_map(x)| at the returned point
};

// Pre-image of a gaussian-kernel embedding sum_i alpha_i K(., x_i) by the
// fixed-point iteration x <- sum_i w_i x_i / sum_i w_i with
// w_i = alpha_i exp(-|x - x_i|^2 / (2 sigma2)).  Restarts from random convex
// combinations of the atoms; divergence or an oscillation window triggers
// re-initialization.  The flag reports whether any restart converged.
PreimageResult preimage(const Vector& alpha, const Matrix& points, const KernelSpec& spec,
                        int max_iters, int num_restarts, double tol,
                        std::uint64_t rng_seed);

}  // namespace rkhs
