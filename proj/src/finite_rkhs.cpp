#include "rkhskit/finite_rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rkhs {

namespace {

// Minimum-norm solution of S y = r for symmetric PSD S, via an
// eigenvalue-thresholded pseudo-inverse (threshold 1e-10 * lambda_max).
Vector psd_pinv_solve(const Matrix& S, const Vector& r, double* residual_out) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
    const Vector& evals = eig.eigenvalues();
    const double lambda_max = evals.cwiseAbs().maxCoeff();
    const double cutoff = 1e-10 * std::max(lambda_max, 1e-300);
    Vector inv = Vector::Zero(evals.size());
    for (Eigen::Index i = 0; i < evals.size(); ++i)
        if (evals[i] > cutoff) inv[i] = 1.0 / evals[i];
    const Vector y = eig.eigenvectors() * inv.asDiagonal() *
                     (eig.eigenvectors().transpose() * r);
    if (residual_out) *residual_out = (S * y - r).norm();
    return y;
}

}  // namespace

SubspaceKernel kernel_from_orthonormal_basis(const Matrix& U, bool check_orthonormal) {
    if (U.rows() == 0 || U.cols() == 0)
        throw std::invalid_argument("kernel_from_orthonormal_basis: empty basis");
    if (check_orthonormal) {
        const Matrix gram = U.transpose() * U;
        const Matrix err = gram - Matrix::Identity(U.cols(), U.cols());
        if (err.cwiseAbs().maxCoeff() > 1e-8)
            throw std::invalid_argument(
                "kernel_from_orthonormal_basis: columns are not orthonormal");
    }
    return {U * U.transpose(), static_cast<int>(U.rows())};
}

SubspaceKernel kernel_from_metric(const Matrix& Q) {
    if (Q.rows() != Q.cols())
        throw std::invalid_argument("kernel_from_metric: Q must be square");
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + Q.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("kernel_from_metric: Q must be symmetric");
    Eigen::LLT<Matrix> llt(Q);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("kernel_from_metric: Q must be positive definite");
    Matrix K = llt.solve(Matrix::Identity(Q.rows(), Q.cols()));
    K = 0.5 * (K + K.transpose());
    return {K, static_cast<int>(Q.rows())};
}

SubspaceKernel kernel_from_spanning_set(const InnerProductSubspace& space) {
    const Matrix& B = space.basis;
    const Matrix& G = space.gram_of_basis;
    if (B.cols() != G.rows() || G.rows() != G.cols())
        throw std::invalid_argument("kernel_from_spanning_set: basis/Gram size mismatch");
    Eigen::FullPivLU<Matrix> lu(G);
    if (!lu.isInvertible())
        throw std::invalid_argument("kernel_from_spanning_set: singular basis Gram matrix");
    Matrix K = B * lu.solve(B.transpose());
    K = 0.5 * (K + K.transpose());
    return {K, static_cast<int>(B.rows())};
}

Vector geometric_kernel_column(const InnerProductSubspace& space, int i) {
    const Matrix& B = space.basis;
    const Matrix& G = space.gram_of_basis;
    if (i < 0 || i >= B.rows())
        throw std::invalid_argument("geometric_kernel_column: index out of range");
    // Minimize c^T G c subject to a^T c = 1 with a = B^T e_i; the Lagrange
    // system gives c = G^{-1} a / (a^T G^{-1} a).  An (almost) zero
    // denominator means V does not meet the hyperplane {e_i^T z = 1}.
    const Vector a = B.row(i).transpose();
    Eigen::FullPivLU<Matrix> lu(G);
    if (!lu.isInvertible())
        throw std::invalid_argument("geometric_kernel_column: singular basis Gram matrix");
    const Vector Ginv_a = lu.solve(a);
    const double denom = a.dot(Ginv_a);
    const double scale = G.cwiseAbs().maxCoeff() + 1.0;
    if (denom <= 1e-12 * scale * a.squaredNorm() || a.norm() == 0.0)
        return Vector::Zero(B.rows());
    const Vector c = Ginv_a / denom;            // coefficients of k~_i
    const double c_norm_sq = c.dot(G * c);      // <k~_i, k~_i>
    return (B * c) / c_norm_sq;
}

InterpolationResult min_norm_interpolate(const Matrix& constraint_gram, const Vector& values) {
    const Matrix& A = constraint_gram;
    if (A.rows() != A.cols() || A.rows() != values.size())
        throw std::invalid_argument("min_norm_interpolate: shape mismatch");
    double residual = 0.0;
    Vector alpha;
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() == Eigen::Success) {
        alpha = llt.solve(values);
        residual = (A * alpha - values).norm();
        // fall back when the Cholesky solve lost too much accuracy
        if (!(residual <= 1e-8 * (1.0 + values.norm())))
            alpha = psd_pinv_solve(A, values, &residual);
    } else {
        alpha = psd_pinv_solve(A, values, &residual);
    }
    if (residual > 1e-8 * (1.0 + values.norm()))
        throw std::runtime_error(
            "min_norm_interpolate: constraints are infeasible (singular Gram, "
            "inconsistent values)");
    return {alpha, alpha.dot(A * alpha), residual};
}

InterpolationResult min_norm_interpolate(const KernelSpec& spec, const Matrix& points,
                                         const Vector& values) {
    return min_norm_interpolate(gram_matrix(spec, points), values);
}

InterpolationResult min_norm_interpolate(const SubspaceKernel& kernel,
                                         const std::vector<int>& indices,
                                         const Vector& values) {
    const auto r = static_cast<Eigen::Index>(indices.size());
    if (r != values.size())
        throw std::invalid_argument("min_norm_interpolate: index/value count mismatch");
    Matrix A(r, r);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j) A(i, j) = kernel.K(indices[i], indices[j]);
    return min_norm_interpolate(A, values);
}

Vector min_norm_linear_solve(const Matrix& A, const Vector& b, double* residual_out) {
    if (A.rows() != b.size())
        throw std::invalid_argument("min_norm_linear_solve: shape mismatch");
    const Matrix AAt = A * A.transpose();
    Eigen::LDLT<Matrix> ldlt(AAt);
    if (ldlt.info() == Eigen::Success) {
        const Vector y = ldlt.solve(b);
        if ((AAt * y - b).norm() <= 1e-8 * (1.0 + b.norm())) {
            const Vector x = A.transpose() * y;
            if (residual_out) *residual_out = (A * x - b).norm();
            return x;
        }
    }
    // rank-deficient rows: SVD pseudo-inverse, minimum-norm least squares
    Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector x = svd.solve(b);
    if (residual_out) *residual_out = (A * x - b).norm();
    return x;
}

Vector solve_via_frame(const Matrix& A, const Vector& b) {
    if (A.rows() != b.size())
        throw std::invalid_argument("solve_via_frame: shape mismatch");
    const Matrix AAt = A * A.transpose();
    Eigen::LLT<Matrix> llt(AAt);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("solve_via_frame: A A^T is singular");
    // <b, c_s>_K = c_s^T (A A^T)^{-1} b, assembled over the standard basis.
    const Vector w = llt.solve(b);
    Vector x(A.cols());
    for (Eigen::Index s = 0; s < A.cols(); ++s) x[s] = A.col(s).dot(w);
    return x;
}

std::vector<MercerEigenpair> mercer_min_kernel(int grid_size, int num_eigs) {
    if (num_eigs < 1) throw std::invalid_argument("mercer_min_kernel: num_eigs must be >= 1");
    if (grid_size < 8 * num_eigs)
        throw std::invalid_argument("mercer_min_kernel: grid_size must be >= 8 * num_eigs");
    const int G = grid_size;
    Matrix R(G, G);
    for (int i = 0; i < G; ++i) {
        const double ti = static_cast<double>(i + 1) / G;
        for (int j = 0; j <= i; ++j) {
            const double tj = static_cast<double>(j + 1) / G;
            R(i, j) = std::min(ti, tj);
            R(j, i) = R(i, j);
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(R / static_cast<double>(G));
    std::vector<MercerEigenpair> out;
    out.reserve(num_eigs);
    for (int k = 0; k < num_eigs; ++k) {
        const Eigen::Index idx = G - 1 - k;  // eigenvalues come sorted ascending
        out.push_back({eig.eigenvalues()[idx], eig.eigenvectors().col(idx)});
    }
    return out;
}

}  // namespace rkhs
