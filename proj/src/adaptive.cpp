#include "rkhskit/adaptive.hpp"

#include <cmath>
#include <stdexcept>

namespace rkhs {

namespace {

Matrix append_row(const Matrix& m, const Vector& row) {
    Matrix out(m.rows() + 1, row.size());
    if (m.rows() > 0) out.topRows(m.rows()) = m;
    out.row(m.rows()) = row.transpose();
    return out;
}

}  // namespace

double adaptive_predict(const Matrix& dict_points, const Vector& alpha,
                        const Vector& x, const KernelSpec& spec) {
    if (dict_points.rows() == 0)
        throw std::invalid_argument("adaptive_predict: empty dictionary");
    return alpha.dot(kernel_column(spec, dict_points, x));
}

KrlsState krls_init(const Vector& x1, double y1, const KernelSpec& spec,
                    double ald_threshold) {
    if (ald_threshold < 0.0)
        throw std::invalid_argument("krls_init: ald_threshold must be >= 0");
    KrlsState s;
    const double k11 = eval_kernel(spec, x1, x1);
    if (k11 <= 0.0) throw std::invalid_argument("krls_init: K(x1,x1) must be > 0");
    s.dict_points = Matrix(1, x1.size());
    s.dict_points.row(0) = x1.transpose();
    s.K_inv = Matrix::Constant(1, 1, 1.0 / k11);
    s.P = Matrix::Identity(1, 1);
    s.alpha = Vector::Constant(1, y1 / k11);
    s.ald_threshold = ald_threshold;
    s.n = 1;
    return s;
}

AdaptiveStepResult krls_step(KrlsState& state, const Vector& x, double y,
                             const KernelSpec& spec) {
    if (state.n < 1)
        throw std::invalid_argument("krls_step: state must be initialized with krls_init");
    const Vector k = kernel_column(spec, state.dict_points, x);
    const double prediction = k.dot(state.alpha);
    const double innovation = y - prediction;

    const Vector a = state.K_inv * k;
    double e = eval_kernel(spec, x, x) - k.dot(a);
    // floor guards the 1/e_n in the dictionary-growth updates
    if (e < 1e-12) e = 1e-12;

    if (e <= state.ald_threshold) {
        // dictionary unchanged; P-weighted gain on the existing coefficients
        const Vector pa = state.P * a;
        const double denom = 1.0 + a.dot(pa);
        state.P -= (pa * pa.transpose()) / denom;
        state.alpha += state.K_inv * pa * (innovation / denom);
    } else {
        // grow the dictionary; block update of K^{-1}
        const auto d = state.dict_points.rows();
        Matrix k_inv(d + 1, d + 1);
        k_inv.topLeftCorner(d, d) = state.K_inv + (a * a.transpose()) / e;
        k_inv.topRightCorner(d, 1) = -a / e;
        k_inv.bottomLeftCorner(1, d) = -a.transpose() / e;
        k_inv(d, d) = 1.0 / e;
        state.K_inv = std::move(k_inv);

        Matrix p(d + 1, d + 1);
        p.setZero();
        p.topLeftCorner(d, d) = state.P;
        p(d, d) = 1.0;
        state.P = std::move(p);

        Vector alpha(d + 1);
        alpha.head(d) = state.alpha - a * (innovation / e);
        alpha[d] = innovation / e;
        state.alpha = std::move(alpha);

        state.dict_points = append_row(state.dict_points, x);
    }
    state.n += 1;
    return {prediction, e};
}

KlmsState klms_init(const Vector& x1, double y1, const KernelSpec& spec,
                    double coherence_threshold, double step_size, double stabilizer) {
    if (coherence_threshold <= 0.0 || coherence_threshold >= 1.0)
        throw std::invalid_argument("klms_init: coherence_threshold must lie in (0, 1)");
    if (step_size <= 0.0) throw std::invalid_argument("klms_init: step_size must be > 0");
    if (stabilizer <= 0.0) throw std::invalid_argument("klms_init: stabilizer must be > 0");
    KlmsState s;
    const double k11 = eval_kernel(spec, x1, x1);
    if (k11 <= 0.0) throw std::invalid_argument("klms_init: K(x1,x1) must be > 0");
    s.dict_points = Matrix(1, x1.size());
    s.dict_points.row(0) = x1.transpose();
    s.alpha = Vector::Constant(1, y1 / k11);
    s.coherence_threshold = coherence_threshold;
    s.step_size = step_size;
    s.stabilizer = stabilizer;
    s.n = 1;
    return s;
}

AdaptiveStepResult klms_step(KlmsState& state, const Vector& x, double y,
                             const KernelSpec& spec) {
    if (state.n < 1)
        throw std::invalid_argument("klms_step: state must be initialized with klms_init");
    const Vector k = kernel_column(spec, state.dict_points, x);
    const double prediction = k.dot(state.alpha);
    const double innovation = y - prediction;
    const double coherence = k.cwiseAbs().maxCoeff();

    if (coherence >= state.coherence_threshold) {
        // coherent with the dictionary: normalized-gradient update in place
        const double gain = state.step_size * innovation / (state.stabilizer + k.squaredNorm());
        state.alpha += gain * k;
    } else {
        const double kxx = eval_kernel(spec, x, x);
        const double norm_sq = k.squaredNorm() + kxx * kxx;
        const double gain = state.step_size * innovation / (state.stabilizer + norm_sq);
        const auto d = state.dict_points.rows();
        Vector alpha(d + 1);
        alpha.head(d) = state.alpha + gain * k;
        alpha[d] = gain * kxx;
        state.alpha = std::move(alpha);
        state.dict_points = append_row(state.dict_points, x);
    }
    state.n += 1;
    return {prediction, coherence};
}

}  // namespace rkhs
