#include "rkhskit/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rkhs {

namespace {

void check_dims(const KernelSpec& spec, const Vector& x, const Vector& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("eval_kernel: dimension mismatch between arguments");
    if (x.size() != spec.input_dim)
        throw std::invalid_argument("eval_kernel: argument dimension " +
                                    std::to_string(x.size()) + " does not match input_dim " +
                                    std::to_string(spec.input_dim));
}

void check_min_domain(double v) {
    if (v < 0.0)
        throw std::domain_error("min kernel requires nonnegative scalar inputs");
}

double sinc_eval(double band, double t, double tau) {
    const double d = t - tau;
    if (d == 0.0) return band / M_PI;  // limit value at coincident arguments
    return std::sin(band * d) / (M_PI * d);
}

// |a_i - b_j|^2 for all pairs, via the expansion |a|^2 + |b|^2 - 2 a.b.
Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b) {
    const Vector a2 = a.rowwise().squaredNorm();
    const Vector b2 = b.rowwise().squaredNorm();
    Matrix d = -2.0 * (a * b.transpose());
    d.colwise() += a2;
    d.rowwise() += b2.transpose();
    return d.cwiseMax(0.0);
}

}  // namespace

KernelSpec KernelSpec::linear(int dim) {
    if (dim < 1) throw std::invalid_argument("linear kernel: input_dim must be positive");
    return {KernelFamily::linear, dim, 1.0, 2, 1.0};
}

KernelSpec KernelSpec::gaussian(double sigma2, int dim) {
    if (sigma2 <= 0.0) throw std::invalid_argument("gaussian kernel: sigma2 must be > 0");
    if (dim < 1) throw std::invalid_argument("gaussian kernel: input_dim must be positive");
    return {KernelFamily::gaussian, dim, sigma2, 2, 1.0};
}

KernelSpec KernelSpec::polynomial(int degree, int dim) {
    if (degree < 1) throw std::invalid_argument("polynomial kernel: degree must be >= 1");
    if (dim < 1) throw std::invalid_argument("polynomial kernel: input_dim must be positive");
    return {KernelFamily::polynomial, dim, 1.0, degree, 1.0};
}

KernelSpec KernelSpec::min() { return {KernelFamily::min, 1, 1.0, 2, 1.0}; }

KernelSpec KernelSpec::sinc(double band) {
    if (band <= 0.0) throw std::invalid_argument("sinc kernel: band must be > 0");
    return {KernelFamily::sinc, 1, 1.0, 2, band};
}

double psd_tolerance(int n) { return 1e-9 * static_cast<double>(n); }

double eval_kernel(const KernelSpec& spec, const Vector& x, const Vector& y) {
    check_dims(spec, x, y);
    switch (spec.family) {
        case KernelFamily::linear:
            return x.dot(y);
        case KernelFamily::gaussian:
            return std::exp(-(x - y).squaredNorm() / (2.0 * spec.sigma2));
        case KernelFamily::polynomial:
            return std::pow(1.0 + x.dot(y), spec.degree);
        case KernelFamily::min:
            check_min_domain(x[0]);
            check_min_domain(y[0]);
            return std::min(x[0], y[0]);
        case KernelFamily::sinc:
            return sinc_eval(spec.band, x[0], y[0]);
    }
    throw std::logic_error("eval_kernel: unknown kernel family");
}

Matrix cross_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
    if (a.rows() == 0 || b.rows() == 0)
        throw std::invalid_argument("cross_gram: empty point list");
    if (a.cols() != spec.input_dim || b.cols() != spec.input_dim)
        throw std::invalid_argument("cross_gram: point dimension does not match input_dim");

    switch (spec.family) {
        case KernelFamily::linear:
            return a * b.transpose();
        case KernelFamily::gaussian:
            return (pairwise_sq_dists(a, b) / (-2.0 * spec.sigma2)).array().exp();
        case KernelFamily::polynomial: {
            Matrix g = (a * b.transpose()).array() + 1.0;
            return g.array().pow(spec.degree);
        }
        case KernelFamily::min: {
            if ((a.array() < 0.0).any() || (b.array() < 0.0).any())
                throw std::domain_error("min kernel requires nonnegative scalar inputs");
            Matrix g(a.rows(), b.rows());
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                for (Eigen::Index j = 0; j < b.rows(); ++j)
                    g(i, j) = std::min(a(i, 0), b(j, 0));
            return g;
        }
        case KernelFamily::sinc: {
            Matrix g(a.rows(), b.rows());
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                for (Eigen::Index j = 0; j < b.rows(); ++j)
                    g(i, j) = sinc_eval(spec.band, a(i, 0), b(j, 0));
            return g;
        }
    }
    throw std::logic_error("cross_gram: unknown kernel family");
}

Matrix gram_matrix(const KernelSpec& spec, const Matrix& points) {
    Matrix g = cross_gram(spec, points, points);
    // symmetrize away rounding asymmetry from the vectorized paths
    return 0.5 * (g + g.transpose());
}

Vector kernel_column(const KernelSpec& spec, const Matrix& points, const Vector& p) {
    Matrix row(1, p.size());
    row.row(0) = p.transpose();
    return cross_gram(spec, points, row).col(0);
}

Matrix center_gram(const Matrix& gram, CenterMode mode) {
    if (gram.rows() != gram.cols())
        throw std::invalid_argument("center_gram: matrix must be square");
    const Vector row_means = gram.rowwise().mean();
    const Vector col_means = gram.colwise().mean();
    const double total_mean = gram.mean();
    Matrix out = gram;
    switch (mode) {
        case CenterMode::both:
            out.colwise() -= row_means;
            out.rowwise() -= col_means.transpose();
            out.array() += total_mean;
            break;
        case CenterMode::left:  // C G: subtract column means from each row
            out.rowwise() -= col_means.transpose();
            break;
        case CenterMode::right:  // G C: subtract row means from each column
            out.colwise() -= row_means;
            break;
    }
    return out;
}

double rkhs_distance_sq(const KernelSpec& spec, const Vector& x, const Vector& y) {
    const double d = eval_kernel(spec, x, x) - 2.0 * eval_kernel(spec, x, y) +
                     eval_kernel(spec, y, y);
    return std::max(d, 0.0);
}

double gaussian_curve_length(const KernelSpec& spec, const Vector& x, double t,
                             int segments) {
    if (spec.family != KernelFamily::gaussian)
        throw std::invalid_argument("gaussian_curve_length: gaussian kernel required");
    if (t < 0.0) throw std::invalid_argument("gaussian_curve_length: t must be >= 0");
    if (segments < 1) throw std::invalid_argument("gaussian_curve_length: segments must be >= 1");
    if (t == 0.0) return 0.0;
    // All chords have the same length: the squared step is (t|x|/N)^2.
    const double step_sq = std::pow(t / segments, 2) * x.squaredNorm();
    const double chord = std::sqrt(2.0 * (1.0 - std::exp(-step_sq / (2.0 * spec.sigma2))));
    return segments * chord;
}

}  // namespace rkhs
