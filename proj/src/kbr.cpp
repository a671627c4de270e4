#include "rkhskit/kbr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rkhskit/rng.hpp"

namespace rkhs {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

// alpha = Lambda K ((K Lambda)^2 + eps I)^{-1} Lambda k
Vector bayes_core(const Matrix& gram, const Vector& mu, double eps, const Vector& k) {
    const Matrix kl = gram * mu.asDiagonal();              // K Lambda
    Matrix lhs = kl * kl;
    lhs.diagonal().array() += eps;
    const Vector rhs = mu.asDiagonal() * k;                // Lambda k
    const Vector solved = Eigen::PartialPivLU<Matrix>(lhs).solve(rhs);
    return mu.asDiagonal() * (gram * solved);              // Lambda K (...)
}

// Pins the coefficient scale between filter steps.  The epsilon-regularized
// solve is not homogeneous in alpha, so an unpinned scale drifts
// multiplicatively until it overflows; the pre-image decode is invariant to
// this rescaling.  Weights are normalized to sum to one when the sum is
// usable, to unit 1-norm otherwise.
Vector normalize_weights(Vector alpha) {
    const double total = alpha.sum();
    const double l1 = alpha.cwiseAbs().sum();
    if (l1 <= 0.0) return alpha;
    if (std::abs(total) > 1e-8 * l1)
        alpha /= total;
    else
        alpha /= l1;
    return alpha;
}

}  // namespace

KbrModel build_kbr_model(const Matrix& train_x, const Matrix& train_y,
                         const KernelSpec& spec_x, const KernelSpec& spec_y,
                         double reg_lambda, double reg_epsilon) {
    if (train_x.rows() != train_y.rows())
        throw std::invalid_argument("build_kbr_model: state/observation count mismatch");
    if (train_x.rows() < 2)
        throw std::invalid_argument("build_kbr_model: at least 2 training pairs required");
    if (reg_lambda <= 0.0 || reg_epsilon <= 0.0)
        throw std::invalid_argument("build_kbr_model: regularizers must be > 0");

    const auto n = train_x.rows() - 1;  // Gram matrices on the first N of N+1 samples
    KbrModel m;
    m.train_x = train_x;
    m.train_y = train_y;
    m.spec_x = spec_x;
    m.spec_y = spec_y;
    m.reg_lambda = reg_lambda;
    m.reg_epsilon = reg_epsilon;
    m.gram_x = gram_matrix(spec_x, train_x.topRows(n));
    m.gram_y = gram_matrix(spec_y, train_y.topRows(n));
    m.gram_x_shift = cross_gram(spec_x, train_x.topRows(n), train_x.bottomRows(n));

    const Matrix reg = m.gram_x + reg_lambda * Matrix::Identity(n, n);
    Eigen::LDLT<Matrix> ldlt(reg);
    m.transition = ldlt.solve(m.gram_x_shift * ldlt.solve(m.gram_x));
    if (!m.transition.allFinite())
        throw std::runtime_error("build_kbr_model: transition matrix has non-finite entries");
    return m;
}

KbrState kbr_filter_init(const KbrModel& model, const Vector& y_first) {
    const auto n = model.n();
    const Vector k = kernel_column(model.spec_y, model.train_y.topRows(n), y_first);
    const Matrix reg = model.gram_y + model.reg_lambda * Matrix::Identity(n, n);
    return {normalize_weights(Eigen::LDLT<Matrix>(reg).solve(k)), 0};
}

Vector kbr_bayes_update(const KbrModel& model, const Vector& mu, const Vector& k_y_obs) {
    return bayes_core(model.gram_y, mu, model.reg_epsilon, k_y_obs);
}

KbrState kbr_filter_step(const KbrModel& model, const KbrState& state, const Vector& y_obs) {
    if (state.alpha.size() != model.n())
        throw std::invalid_argument("kbr_filter_step: state does not match model size");
    const Vector mu = model.transition * state.alpha;
    const Vector k = kernel_column(model.spec_y, model.train_y.topRows(model.n()), y_obs);
    Vector alpha = normalize_weights(kbr_bayes_update(model, mu, k));
    if (!all_finite(alpha))
        throw std::runtime_error("kbr_filter_step: numerical overflow at step " +
                                 std::to_string(state.step + 1));
    return {std::move(alpha), state.step + 1};
}

Vector kbr_posterior(const Vector& prior_gamma, const Matrix& prior_y,
                     const Matrix& joint_x, const Matrix& joint_y,
                     const KernelSpec& spec_x, const KernelSpec& spec_y,
                     double reg_lambda, double reg_epsilon, const Vector& query_x) {
    if (joint_x.rows() != joint_y.rows())
        throw std::invalid_argument("kbr_posterior: joint sample count mismatch");
    if (prior_gamma.size() != prior_y.rows())
        throw std::invalid_argument("kbr_posterior: prior coefficient/sample mismatch");
    if (reg_lambda <= 0.0 || reg_epsilon <= 0.0)
        throw std::invalid_argument("kbr_posterior: regularizers must be > 0");

    const auto n = joint_x.rows();
    // mu_pi evaluated at the joint y samples, then mu = (K_y + lambda I)^{-1} mu_pi
    const Vector mu_pi = cross_gram(spec_y, joint_y, prior_y) * prior_gamma;
    const Matrix reg = gram_matrix(spec_y, joint_y) + reg_lambda * Matrix::Identity(n, n);
    const Vector mu = Eigen::LDLT<Matrix>(reg).solve(mu_pi);

    const Matrix gram_x = gram_matrix(spec_x, joint_x);
    const Vector kx = kernel_column(spec_x, joint_x, query_x);
    return bayes_core(gram_x, mu, reg_epsilon, kx);
}

PreimageResult preimage(const Vector& alpha, const Matrix& points, const KernelSpec& spec,
                        int max_iters, int num_restarts, double tol,
                        std::uint64_t rng_seed) {
    if (spec.family != KernelFamily::gaussian)
        throw std::invalid_argument("preimage: radial (gaussian) kernel required");
    if (alpha.size() != points.rows())
        throw std::invalid_argument("preimage: coefficient/point count mismatch");
    if (num_restarts < 1 || max_iters < 1)
        throw std::invalid_argument("preimage: iteration counts must be >= 1");

    const auto n = points.rows();
    const auto d = points.cols();
    const Vector centroid = points.colwise().mean();
    double radius = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        radius = std::max(radius, (points.row(i).transpose() - centroid).norm());
    const double escape = 10.0 * std::max(radius, 1e-12);

    auto fixed_point_map = [&](const Vector& x, Vector& out) {
        // w_i = alpha_i exp(-|x - x_i|^2 / (2 sigma2)); constants cancel
        Vector w(n);
        for (Eigen::Index i = 0; i < n; ++i)
            w[i] = alpha[i] *
                   std::exp(-(points.row(i).transpose() - x).squaredNorm() / (2.0 * spec.sigma2));
        const double total = w.sum();
        if (std::abs(total) < 1e-300) return false;
        out = (points.transpose() * w) / total;
        return true;
    };

    // RKHS objective up to an additive constant: -2 sum_i alpha_i K(x, x_i)
    auto objective = [&](const Vector& x) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            s += alpha[i] *
                 std::exp(-(points.row(i).transpose() - x).squaredNorm() / (2.0 * spec.sigma2));
        return -2.0 * s;
    };

    const Rng root(rng_seed);
    PreimageResult best;
    double best_objective = std::numeric_limits<double>::infinity();

    for (int r = 0; r < num_restarts; ++r) {
        Rng rng = root.substream(static_cast<std::uint64_t>(r + 1));
        // random convex combination of the atoms
        Vector w(n);
        for (Eigen::Index i = 0; i < n; ++i) w[i] = rng.uniform();
        w /= w.sum();
        Vector x = points.transpose() * w;

        Vector history[4];
        int hist_count = 0;
        bool converged = false;
        double residual = std::numeric_limits<double>::infinity();
        for (int it = 0; it < max_iters; ++it) {
            Vector next(d);
            if (!fixed_point_map(x, next)) break;  // degenerate weights: restart
            residual = (next - x).norm();
            if (!next.allFinite() || (next - centroid).norm() > escape) break;
            // oscillation check over a window of 4 iterates
            bool cycle = false;
            for (int h = 0; h < std::min(hist_count, 4); ++h)
                if ((next - history[h]).norm() < 1e-14 && residual > tol) cycle = true;
            history[it % 4] = next;
            hist_count = std::min(hist_count + 1, 4);
            x = next;
            if (cycle) break;
            if (residual <= tol) {
                converged = true;
                break;
            }
        }
        if (converged) {
            const double obj = objective(x);
            if (!best.converged || obj < best_objective) {
                best = {x, true, residual};
                best_objective = obj;
            }
        } else if (!best.converged && x.allFinite()) {
            const double obj = objective(x);
            if (obj < best_objective) {
                best = {x, false, residual};
                best_objective = obj;
            }
        }
    }
    return best;
}

}  // namespace rkhs
