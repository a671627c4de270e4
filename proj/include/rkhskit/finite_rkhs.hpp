#pragma once

#include <utility>
#include <vector>

#include "rkhskit/kernels.hpp"

namespace rkhs {

// n x n PSD matrix representing an inner-product subspace of R^n.
// Columns k_i span the subspace and reproduce coordinates:
// <v, k_i> = e_i^T v for every v in the subspace, with the induced
// inner product <K a, K b> = b^T K a.
struct SubspaceKernel {
    Matrix K;
    int n = 0;
};

// A subspace given extrinsically: spanning columns plus their Gram matrix
// G_ij = <v_i, v_j> under the subspace's own inner product.
struct InnerProductSubspace {
    Matrix basis;          // n x r
    Matrix gram_of_basis;  // r x r, symmetric PSD
};

// K = U U^T for columns orthonormal in the subspace inner product.
// With check_orthonormal the columns are verified Euclidean-orthonormal
// (the common case); pass false when the declared inner product differs.
SubspaceKernel kernel_from_orthonormal_basis(const Matrix& U,
                                             bool check_orthonormal = true);

// Full-space case <u, v> = v^T Q u: the kernel is K = Q^{-1}.
SubspaceKernel kernel_from_metric(const Matrix& Q);

// General case: each column k_i solves <v_j, k_i> = e_i^T v_j over the
// span of the basis, giving K = B G^{-1} B^T.
SubspaceKernel kernel_from_spanning_set(const InnerProductSubspace& space);

// Geometric construction of column i: scale the minimum-norm point of
// V intersected with {z : e_i^T z = 1}; the zero vector when the
// intersection is empty.
Vector geometric_kernel_column(const InnerProductSubspace& space, int i);

struct InterpolationResult {
    Vector alpha;      // expansion coefficients over the constraint atoms
    double norm_sq;    // alpha^T A alpha, the squared RKHS norm of the interpolant
    double residual;   // |A alpha - c|, zero for consistent systems
};

// Minimum-norm interpolation: solve A alpha = c with A_ij = K(x_i, x_j).
// A singular-but-consistent system yields the minimum-norm coefficient
// vector through an eigenvalue-thresholded pseudo-inverse; inconsistent
// constraints throw.
InterpolationResult min_norm_interpolate(const Matrix& constraint_gram, const Vector& values);

// Convenience form for a kernel on sampled points (rows of `points`).
InterpolationResult min_norm_interpolate(const KernelSpec& spec, const Matrix& points,
                                         const Vector& values);

// Constraints on selected coordinates of a subspace element; the
// interpolant itself is K(:, idx) * alpha.
InterpolationResult min_norm_interpolate(const SubspaceKernel& kernel,
                                         const std::vector<int>& indices,
                                         const Vector& values);

// Minimum Euclidean norm solution of A x = b; the closed form
// A^T (A A^T)^{-1} b when A A^T is well conditioned, otherwise an SVD
// pseudo-inverse (least-squares residual in *residual_out when given).
Vector min_norm_linear_solve(const Matrix& A, const Vector& b,
                             double* residual_out = nullptr);

// Same solution computed through the frame route of the kernel K = A A^T:
// x_s = <b, c_s>_K with c_s the s-th column of A.
Vector solve_via_frame(const Matrix& A, const Vector& b);

struct MercerEigenpair {
    double value;
    Vector vector;  // grid samples, unit Euclidean norm
};

// Top-k eigenpairs of the discretized min kernel R(t,s) = min(t,s) on the
// uniform grid {i/G : i = 1..G}, scaled by 1/G so that eigenvalue j
// approximates ((j - 1/2) pi)^{-2}.
std::vector<MercerEigenpair> mercer_min_kernel(int grid_size, int num_eigs);

}  // namespace rkhs
