#include <doctest.h>

#include <cmath>

#include "rkhskit/finite_rkhs.hpp"
#include "rkhskit/rng.hpp"

using namespace rkhs;

namespace {

Matrix random_spd(Rng& rng, int n) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    return a * a.transpose() + 0.2 * Matrix::Identity(n, n);
}

Matrix random_orthonormal(Rng& rng, int n, int r) {
    Matrix a(n, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < r; ++j) a(i, j) = rng.normal();
    return Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(n, r);
}

// SVD pseudo-inverse solution, the oracle for the minimum-norm solvers.
Vector pinv_solve(const Matrix& a, const Vector& b) {
    return Eigen::BDCSVD<Matrix>(a, Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
}

}  // namespace

TEST_SUITE("finite_rkhs") {

TEST_CASE("kernel_from_orthonormal_basis exact cases") {
    SUBCASE("identity basis gives identity kernel") {
        const auto k = kernel_from_orthonormal_basis(Matrix::Identity(3, 3));
        CHECK((k.K - Matrix::Identity(3, 3)).norm() == doctest::Approx(0.0));
    }
    SUBCASE("single Euclidean basis vector e1 in 2-D") {
        Matrix u(2, 1);
        u << 1, 0;
        const auto k = kernel_from_orthonormal_basis(u);
        Matrix expect(2, 2);
        expect << 1, 0, 0, 0;
        CHECK((k.K - expect).norm() == doctest::Approx(0.0));
    }
    SUBCASE("(1,1) declared unit norm gives the all-ones kernel") {
        Matrix u(2, 1);
        u << 1, 1;
        CHECK_THROWS_AS(kernel_from_orthonormal_basis(u), std::invalid_argument);
        const auto k = kernel_from_orthonormal_basis(u, false);
        Matrix expect(2, 2);
        expect << 1, 1, 1, 1;
        CHECK((k.K - expect).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("kernel_from_metric") {
    SUBCASE("identity metric") {
        const auto k = kernel_from_metric(Matrix::Identity(3, 3));
        CHECK((k.K - Matrix::Identity(3, 3)).norm() == doctest::Approx(0.0));
    }
    SUBCASE("diag(1, 16) inverts to diag(1, 1/16)") {
        Matrix q = Matrix::Zero(2, 2);
        q(0, 0) = 1.0;
        q(1, 1) = 16.0;
        const auto k = kernel_from_metric(q);
        CHECK(k.K(0, 0) == doctest::Approx(1.0));
        CHECK(k.K(1, 1) == doctest::Approx(1.0 / 16.0));
    }
    SUBCASE("random SPD: K Q = I") {
        Rng rng(5);
        const Matrix q = random_spd(rng, 3);
        const auto k = kernel_from_metric(q);
        CHECK((k.K * q - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
    }
    SUBCASE("rejects non-symmetric and singular inputs") {
        Matrix q(2, 2);
        q << 1, 2, 0, 1;
        CHECK_THROWS_AS(kernel_from_metric(q), std::invalid_argument);
        Matrix s = Matrix::Zero(2, 2);
        s(0, 0) = 1.0;
        CHECK_THROWS_AS(kernel_from_metric(s), std::invalid_argument);
    }
}

TEST_CASE("kernel_from_spanning_set agrees with the other constructions") {
    Rng rng(9);
    SUBCASE("full space with Gram Q equals metric construction") {
        const Matrix q = random_spd(rng, 4);
        const auto via_metric = kernel_from_metric(q);
        const auto via_span = kernel_from_spanning_set({Matrix::Identity(4, 4), q});
        CHECK((via_metric.K - via_span.K).cwiseAbs().maxCoeff() <= 1e-8);
    }
    SUBCASE("orthonormal basis equals outer-product construction") {
        const Matrix u = random_orthonormal(rng, 5, 2);
        const auto via_outer = kernel_from_orthonormal_basis(u);
        const auto via_span =
            kernel_from_spanning_set({u, Matrix::Identity(2, 2)});
        CHECK((via_outer.K - via_span.K).cwiseAbs().maxCoeff() <= 1e-8);
    }
    SUBCASE("1-D span of (1,1) with unit norm") {
        Matrix b(2, 1);
        b << 1, 1;
        const auto k = kernel_from_spanning_set({b, Matrix::Ones(1, 1)});
        Matrix expect(2, 2);
        expect << 1, 1, 1, 1;
        CHECK((k.K - expect).norm() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("geometric_kernel_column") {
    SUBCASE("empty intersection yields the zero column") {
        Matrix b(2, 1);
        b << 1, 0;  // span{e1} in R^2, standard inner product
        const Vector k2 = geometric_kernel_column({b, Matrix::Identity(1, 1)}, 1);
        CHECK(k2.norm() == doctest::Approx(0.0));
    }
    SUBCASE("full plane with identity metric gives e_i") {
        const InnerProductSubspace space{Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
        CHECK((geometric_kernel_column(space, 0) - Vector::Unit(2, 0)).norm() <= 1e-12);
    }
    SUBCASE("random 2-D subspace of R^3 matches kernel_from_spanning_set") {
        Rng rng(21);
        for (int t = 0; t < 20; ++t) {
            Matrix b(3, 2);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 2; ++j) b(i, j) = rng.normal();
            const Matrix g = random_spd(rng, 2);
            const InnerProductSubspace space{b, g};
            const auto k = kernel_from_spanning_set(space);
            for (int i = 0; i < 3; ++i)
                CHECK((geometric_kernel_column(space, i) - k.K.col(i)).cwiseAbs().maxCoeff() <=
                      1e-8);
        }
    }
}

TEST_CASE("construction equivalence and reproducing identity on random subspaces") {
    Rng rng(33);
    for (int t = 0; t < 25; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform_below(5));  // up to 6
        const int r = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
        const Matrix u = random_orthonormal(rng, n, r);
        const auto k = kernel_from_orthonormal_basis(u);
        const auto via_span = kernel_from_spanning_set({u, Matrix::Identity(r, r)});
        CHECK((k.K - via_span.K).cwiseAbs().maxCoeff() <= 1e-8);

        // reproducing identity: v = K a has <v, k_i> = e_i^T v.  The inner
        // product is evaluated independently through the orthonormal basis
        // coordinates: <U c, U d> = d^T c.
        Vector a(n);
        for (int i = 0; i < n; ++i) a[i] = rng.normal();
        const Vector v = k.K * a;
        const Vector c = u.transpose() * v;
        for (int i = 0; i < n; ++i) {
            const Vector d = u.transpose() * k.K.col(i);
            CHECK(d.dot(c) == doctest::Approx(v[i]).epsilon(1e-8));
        }
    }

    // same identity with a metric-defined full space: <x, y> = y^T Q x
    for (int t = 0; t < 10; ++t) {
        Matrix qa(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) qa(i, j) = rng.normal();
        const Matrix q = qa * qa.transpose() + 0.3 * Matrix::Identity(4, 4);
        const auto k = kernel_from_metric(q);
        Vector a(4);
        for (int i = 0; i < 4; ++i) a[i] = rng.normal();
        const Vector v = k.K * a;
        for (int i = 0; i < 4; ++i)
            CHECK(k.K.col(i).dot(q * v) == doctest::Approx(v[i]).epsilon(1e-8));
    }
}

TEST_CASE("line kernel is pi-periodic, Lipschitz, and projects") {
    auto line_kernel = [](double theta) {
        Matrix u(2, 1);
        u << std::cos(theta), std::sin(theta);
        return kernel_from_orthonormal_basis(u).K;
    };
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        CHECK((line_kernel(theta) - line_kernel(theta + M_PI)).cwiseAbs().maxCoeff() <=
              1e-12);
        const double delta = rng.uniform(-0.01, 0.01);
        CHECK((line_kernel(theta + delta) - line_kernel(theta)).norm() <=
              4.0 * std::abs(delta));

        // f(L) = p1 k1 + p2 k2 equals the Euclidean projection of p onto L
        const Vector p = (Vector(2) << rng.normal(), rng.normal()).finished();
        const Matrix K = line_kernel(theta);
        const Vector via_kernel = p[0] * K.col(0) + p[1] * K.col(1);
        const Vector dir = (Vector(2) << std::cos(theta), std::sin(theta)).finished();
        const Vector projection = dir * dir.dot(p);
        CHECK((via_kernel - projection).norm() <= 1e-10);
    }
}

TEST_CASE("min_norm_interpolate") {
    Rng rng(3);
    SUBCASE("single constraint on a subspace kernel: x = K_ii^{-1} k_i") {
        const Matrix q = random_spd(rng, 3);
        const auto k = kernel_from_metric(q);
        const auto res = min_norm_interpolate(k, {1}, Vector::Ones(1));
        CHECK(res.alpha[0] == doctest::Approx(1.0 / k.K(1, 1)).epsilon(1e-12));
        CHECK(res.norm_sq == doctest::Approx(1.0 / k.K(1, 1)).epsilon(1e-12));
    }
    SUBCASE("identity kernel") {
        const SubspaceKernel k{Matrix::Identity(3, 3), 3};
        const auto res = min_norm_interpolate(k, {0}, Vector::Constant(1, 2.5));
        CHECK(res.alpha[0] == doctest::Approx(2.5));
    }
    SUBCASE("min-kernel interpolant energy equals the piecewise-linear oracle") {
        Matrix pts(3, 1);
        pts << 0.25, 0.5, 1.0;
        Vector vals(3);
        vals << 0.25, 0.5, 1.0;  // m(t) = t
        const auto res = min_norm_interpolate(KernelSpec::min(), pts, vals);
        // oracle: sum (dm)^2 / dt over the segments from (0,0)
        double energy = 0.0;
        double t_prev = 0.0, m_prev = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double dm = vals[i] - m_prev;
            energy += dm * dm / (pts(i, 0) - t_prev);
            t_prev = pts(i, 0);
            m_prev = vals[i];
        }
        CHECK(energy == doctest::Approx(1.0));
        CHECK(res.norm_sq == doctest::Approx(energy).epsilon(1e-10));
    }
    SUBCASE("inconsistent singular system reports infeasible") {
        Matrix a = Matrix::Ones(2, 2);  // rank one
        Vector c(2);
        c << 1.0, 2.0;  // not in the range
        CHECK_THROWS_AS(min_norm_interpolate(a, c), std::runtime_error);
    }
    SUBCASE("consistent singular system returns the minimum-norm coefficients") {
        Matrix a = Matrix::Ones(2, 2);
        Vector c = Vector::Ones(2);
        const auto res = min_norm_interpolate(a, c);
        CHECK((a * res.alpha - c).norm() <= 1e-10);
        CHECK(res.alpha[0] == doctest::Approx(res.alpha[1]));  // symmetric minimum
    }
    SUBCASE("minimality: feasible perturbations within V increase the norm") {
        for (int t = 0; t < 10; ++t) {
            const Matrix q = random_spd(rng, 4);
            const auto k = kernel_from_metric(q);
            const std::vector<int> idx = {0, 2};
            Vector c(2);
            c << rng.normal(), rng.normal();
            const auto res = min_norm_interpolate(k, idx, c);
            // interpolant x = sum_j alpha_j k_{idx_j}
            Vector x = Vector::Zero(4);
            for (int j = 0; j < 2; ++j) x += res.alpha[j] * k.K.col(idx[j]);
            const double base = x.dot(q * x);  // squared norm under metric q
            CHECK(base == doctest::Approx(res.norm_sq).epsilon(1e-8));
            // perturb within V (= R^4 here) along constraint-null directions
            for (int p = 0; p < 5; ++p) {
                Vector w(4);
                for (int i = 0; i < 4; ++i) w[i] = rng.normal();
                for (int j : idx) w[j] = 0.0;  // keep e_i^T x fixed
                const Vector xp = x + w;
                CHECK(xp.dot(q * xp) >= base - 1e-10);
            }
        }
    }
}

TEST_CASE("min_norm_linear_solve and solve_via_frame") {
    Rng rng(8);
    SUBCASE("identity") {
        const Vector b = (Vector(3) << 1, 2, 3).finished();
        CHECK((min_norm_linear_solve(Matrix::Identity(3, 3), b) - b).norm() <= 1e-12);
        CHECK((solve_via_frame(Matrix::Identity(3, 3), b) - b).norm() <= 1e-12);
    }
    SUBCASE("symmetric split for A = [1 1]") {
        Matrix a(1, 2);
        a << 1, 1;
        const Vector x = min_norm_linear_solve(a, Vector::Constant(1, 2.0));
        CHECK(x[0] == doctest::Approx(1.0));
        CHECK(x[1] == doctest::Approx(1.0));
    }
    SUBCASE("random full-row-rank systems match the pseudo-inverse oracle") {
        for (int t = 0; t < 100; ++t) {
            const int r = 1 + static_cast<int>(rng.uniform_below(8));
            const int n = r + 1 + static_cast<int>(rng.uniform_below(8));
            Matrix a(r, n);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
            Vector b(r);
            for (int i = 0; i < r; ++i) b[i] = rng.normal();
            const Vector oracle = pinv_solve(a, b);
            CHECK((min_norm_linear_solve(a, b) - oracle).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK((solve_via_frame(a, b) - oracle).cwiseAbs().maxCoeff() <= 1e-8);
            // closed form A^T (A A^T)^{-1} b on the nonsingular case
            const Vector closed =
                a.transpose() * (a * a.transpose()).ldlt().solve(b);
            CHECK((min_norm_linear_solve(a, b) - closed).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
    SUBCASE("rank-deficient fallback reports the least-squares residual") {
        Matrix a(2, 2);
        a << 1, 0, 1, 0;  // rank one
        Vector b(2);
        b << 1.0, 2.0;  // inconsistent
        double residual = 0.0;
        const Vector x = min_norm_linear_solve(a, b, &residual);
        CHECK(residual > 0.1);
        CHECK((a * x - b).norm() == doctest::Approx(residual));
        CHECK_THROWS_AS(solve_via_frame(a, b), std::runtime_error);
    }
}

TEST_CASE("mercer_min_kernel eigenstructure") {
    const auto pairs = mercer_min_kernel(1000, 3);
    SUBCASE("first eigenvalue near 4/pi^2") {
        CHECK(pairs[0].value == doctest::Approx(4.0 / (M_PI * M_PI)).epsilon(0.005));
    }
    SUBCASE("third eigenvalue near 1/(2.5 pi)^2") {
        CHECK(pairs[2].value == doctest::Approx(std::pow(2.5 * M_PI, -2)).epsilon(0.03));
        CHECK(std::abs(pairs[2].value - std::pow(2.5 * M_PI, -2)) <= 5e-4);
    }
    SUBCASE("first eigenvector matches sqrt2 sin(pi t / 2)") {
        const int g = 1000;
        Vector expect(g);
        for (int i = 0; i < g; ++i)
            expect[i] = std::sqrt(2.0) * std::sin(M_PI * (i + 1.0) / g / 2.0);
        const double cos_sim =
            std::abs(pairs[0].vector.dot(expect)) / (pairs[0].vector.norm() * expect.norm());
        CHECK(cos_sim >= 0.999);
    }
    SUBCASE("precondition G >= 8k") {
        CHECK_THROWS_AS(mercer_min_kernel(30, 4), std::invalid_argument);
    }
}

}  // TEST_SUITE
