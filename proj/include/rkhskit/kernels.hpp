#pragma once

#include <Eigen/Dense>

namespace rkhs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class KernelFamily { linear, gaussian, polynomial, min, sinc };

// A parameterized positive semi-definite kernel on a vector domain.
// Samples are rows of an Eigen matrix; scalar domains use one column.
//
// The gaussian family is exp(-|x-y|^2 / (2 sigma2)).  Sources that write
// exp(-|x-y|^2 / s2) map into this convention with sigma2 = s2 / 2; the
// experiment harness performs that conversion explicitly where needed.
struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;
    int input_dim = 1;
    double sigma2 = 1.0;  // gaussian bandwidth, > 0
    int degree = 2;       // polynomial degree, >= 1 (unit offset is fixed)
    double band = 1.0;    // sinc band limit, > 0

    static KernelSpec linear(int dim);
    static KernelSpec gaussian(double sigma2, int dim);
    static KernelSpec polynomial(int degree, int dim);
    static KernelSpec min();   // nonnegative scalars only
    static KernelSpec sinc(double band);

    // True when K(x,x) = 1 for every x (required by coherence tests).
    bool normalized() const { return family == KernelFamily::gaussian; }
};

double psd_tolerance(int n);

double eval_kernel(const KernelSpec& spec, const Vector& x, const Vector& y);

// Gram matrix of a sample set (rows of `points`).
Matrix gram_matrix(const KernelSpec& spec, const Matrix& points);

// Rectangular Gram block K(a_i, b_j).
Matrix cross_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);

// Vector (K(p, x_1), ..., K(p, x_N)).
Vector kernel_column(const KernelSpec& spec, const Matrix& points, const Vector& p);

enum class CenterMode { both, left, right };

// C G C with C = I - (1/N) 11^T; one-sided variants on request.
Matrix center_gram(const Matrix& gram, CenterMode mode = CenterMode::both);

// Squared RKHS distance between the atoms of x and y:
// K(x,x) - 2 K(x,y) + K(y,y).
double rkhs_distance_sq(const KernelSpec& spec, const Vector& x, const Vector& y);

// Polygonal approximation of the curve length of s -> K(., s x) for
// s in [0, t], using `segments` chords.  Converges to t |x| / sigma.
double gaussian_curve_length(const KernelSpec& spec, const Vector& x, double t,
                             int segments);

}  // namespace rkhs
