#include "rkhskit/embeddings.hpp"

#include <stdexcept>

namespace rkhs {

double MeanEmbedding::evaluate(const Vector& z) const {
    return coeffs.dot(kernel_column(kernel, points, z));
}

double MeanEmbedding::inner(const MeanEmbedding& other) const {
    const Matrix g = cross_gram(kernel, points, other.points);
    return coeffs.dot(g * other.coeffs);
}

MeanEmbedding mean_embed(const KernelSpec& spec, const Matrix& samples) {
    if (samples.rows() == 0) throw std::invalid_argument("mean_embed: empty sample set");
    const auto n = samples.rows();
    return {samples, Vector::Constant(n, 1.0 / static_cast<double>(n)), spec};
}

double cov_bilinear(const CovOperatorRep& rep, const Vector& alpha, const Vector& beta) {
    const auto n = rep.gram_x.rows();
    if (rep.gram_y.rows() != n || alpha.size() != n || beta.size() != n)
        throw std::invalid_argument("cov_bilinear: shape mismatch");
    Vector kyb = rep.gram_y * beta;
    if (rep.centered) kyb.array() -= kyb.mean();
    return alpha.dot(rep.gram_x * kyb) / static_cast<double>(n);
}

Vector apply_reg_inverse(const Matrix& gram, double reg_lambda, const Vector& beta) {
    if (reg_lambda <= 0.0)
        throw std::invalid_argument("apply_reg_inverse: reg_lambda must be > 0");
    const auto n = gram.rows();
    if (gram.cols() != n || beta.size() != n)
        throw std::invalid_argument("apply_reg_inverse: shape mismatch");
    const Matrix reg = gram + static_cast<double>(n) * reg_lambda *
                                  Matrix::Identity(n, n);
    return static_cast<double>(n) * Eigen::LDLT<Matrix>(reg).solve(beta);
}

double mmd_sq(const KernelSpec& spec, const Matrix& samples_p, const Matrix& samples_q) {
    if (samples_p.rows() == 0 || samples_q.rows() == 0)
        throw std::invalid_argument("mmd_sq: empty sample set");
    const double n = static_cast<double>(samples_p.rows());
    const double m = static_cast<double>(samples_q.rows());
    const double pp = cross_gram(spec, samples_p, samples_p).sum() / (n * n);
    const double qq = cross_gram(spec, samples_q, samples_q).sum() / (m * m);
    const double pq = cross_gram(spec, samples_p, samples_q).sum() / (n * m);
    return std::max(pp + qq - 2.0 * pq, 0.0);
}

DeflectionResult deflection_detector(const Vector& mu0, const Vector& mu1,
                                     const Matrix& sigma0, double reg_lambda) {
    if (mu0.size() != mu1.size() || sigma0.rows() != mu0.size() ||
        sigma0.cols() != mu0.size())
        throw std::invalid_argument("deflection_detector: shape mismatch");
    const Vector delta = mu1 - mu0;
    Matrix S = sigma0;
    if (reg_lambda > 0.0)
        S += reg_lambda * Matrix::Identity(S.rows(), S.cols());
    Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "deflection_detector: covariance is not positive definite; supply reg_lambda > 0");
    const Vector f = llt.solve(delta);
    return {f, delta.dot(f)};
}

DeflectionResult deflection_detector(const Matrix& gram, const Vector& delta_coeffs,
                                     double reg_lambda) {
    const Vector f = apply_reg_inverse(gram, reg_lambda, delta_coeffs);
    return {f, delta_coeffs.dot(gram * f)};
}

}  // namespace rkhs
