#include "rkhskit/independence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rkhskit/rng.hpp"

namespace rkhs {

namespace {

void check_pair(const Matrix& gx, const Matrix& gy) {
    if (gx.rows() != gx.cols() || gy.rows() != gy.cols() || gx.rows() != gy.rows())
        throw std::invalid_argument("hsic: Gram matrices must be square with equal size");
    if (gx.rows() < 2)
        throw std::invalid_argument("hsic: at least two samples required");
}

Matrix psd_sqrt(const Matrix& g) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    const Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double hsic_batch(const Matrix& gram_x, const Matrix& gram_y) {
    check_pair(gram_x, gram_y);
    const double n = static_cast<double>(gram_x.rows());
    const Matrix cx = center_gram(gram_x, CenterMode::both);
    // Tr(C Kx C Ky) = sum_ij (C Kx C)_ij (Ky)_ji, and both factors are symmetric
    return cx.cwiseProduct(gram_y).sum() / (n * n);
}

double max_correlation(const Matrix& gram_x, const Matrix& gram_y) {
    check_pair(gram_x, gram_y);
    const double n = static_cast<double>(gram_x.rows());
    const Matrix rx = psd_sqrt(gram_x);
    const Matrix ry = psd_sqrt(gram_y);
    const Matrix inner = center_gram(rx, CenterMode::right) * ry;  // Kx^{1/2} C Ky^{1/2}
    Eigen::BDCSVD<Matrix> svd(inner);
    return svd.singularValues()[0] / n;
}

HsicDictionary make_hsic_dictionary(double mu) {
    if (mu <= 0.0 || mu > 1.0)
        throw std::invalid_argument("sparse HSIC: mu must lie in (0, 1]");
    HsicDictionary d;
    d.mu = mu;
    return d;
}

double sparse_hsic_update(HsicDictionary& state, const Vector& x_n, const Vector& y_n,
                          const KernelSpec& spec_x, const KernelSpec& spec_y) {
    if (!spec_x.normalized() || !spec_y.normalized())
        throw std::invalid_argument(
            "sparse HSIC: coherence rule requires normalized kernels (K(x,x) = 1)");
    const int n = state.n + 1;
    const double nn = static_cast<double>(n);
    const double shrink = (nn - 1.0) * (nn - 1.0) / (nn * nn);

    const double kappa_x = eval_kernel(spec_x, x_n, x_n);
    const double kappa_y = eval_kernel(spec_y, y_n, y_n);

    Vector kx, ky;
    if (state.dict_size() > 0) {
        kx = kernel_column(spec_x, state.atoms_x, x_n);
        ky = kernel_column(spec_y, state.atoms_y, y_n);
    } else {
        kx = Vector(0);
        ky = Vector(0);
    }

    const double pik_xy = state.dict_size() ? state.counts.dot(kx.cwiseProduct(ky)) : 0.0;
    const double pik_x = state.dict_size() ? state.counts.dot(kx) : 0.0;
    const double pik_y = state.dict_size() ? state.counts.dot(ky) : 0.0;

    state.norm_sq_Myx = shrink * state.norm_sq_Myx + (2.0 * pik_xy + kappa_x * kappa_y) / (nn * nn);
    state.norm_sq_mx = shrink * state.norm_sq_mx + (2.0 * pik_x + kappa_x) / (nn * nn);
    state.norm_sq_my = shrink * state.norm_sq_my + (2.0 * pik_y + kappa_y) / (nn * nn);

    // coherence of the candidate with the dictionary, sup |Kx Ky|
    int argmax_atom = -1;
    double coherence = 0.0;
    for (int a = 0; a < state.dict_size(); ++a) {
        const double c = std::abs(kx[a] * ky[a]);
        if (c > coherence) {  // strict: ties resolve to the lowest index
            coherence = c;
            argmax_atom = a;
        }
    }

    if (state.dict_size() == 0 || coherence <= state.mu) {
        // new atom: extend the running vectors and the counts
        const auto d = state.dict_size();
        Matrix ax(d + 1, x_n.size()), ay(d + 1, y_n.size());
        if (d > 0) {
            ax.topRows(d) = state.atoms_x;
            ay.topRows(d) = state.atoms_y;
        }
        ax.row(d) = x_n.transpose();
        ay.row(d) = y_n.transpose();
        state.atoms_x = std::move(ax);
        state.atoms_y = std::move(ay);

        Vector vx(d + 1), vy(d + 1), cnt(d + 1);
        if (d > 0) {
            vx.head(d) = state.v_x + kx;
            vy.head(d) = state.v_y + ky;
            cnt.head(d) = state.counts;
        }
        vx[d] = pik_x + kappa_x;
        vy[d] = pik_y + kappa_y;
        cnt[d] = 1.0;
        state.v_x = std::move(vx);
        state.v_y = std::move(vy);
        state.counts = std::move(cnt);
        state.indices.push_back(n);
    } else {
        state.v_x += kx;
        state.v_y += ky;
        state.counts[argmax_atom] += 1.0;
    }

    state.n = n;
    state.cross_c = state.counts.dot(state.v_x.cwiseProduct(state.v_y)) / (nn * nn * nn);
    return state.norm_sq_Myx + state.norm_sq_mx * state.norm_sq_my - 2.0 * state.cross_c;
}

double perm_quantile(std::vector<double>& draws, double level) {
    if (draws.empty()) throw std::invalid_argument("perm_quantile: no draws");
    if (level <= 0.0 || level > 1.0)
        throw std::invalid_argument("perm_quantile: level must lie in (0, 1]");
    std::sort(draws.begin(), draws.end());
    const double pos = (1.0 - level) * static_cast<double>(draws.size());
    auto idx = static_cast<std::size_t>(std::ceil(pos));
    if (idx < 1) idx = 1;
    if (idx > draws.size()) idx = draws.size();
    return draws[idx - 1];
}

PermTestResult independence_perm_test(const Matrix& samples_x, const Matrix& samples_y,
                                      const KernelSpec& spec_x, const KernelSpec& spec_y,
                                      int num_perms, double level, std::uint64_t rng_seed) {
    if (samples_x.rows() != samples_y.rows())
        throw std::invalid_argument("independence_perm_test: sample count mismatch");
    if (samples_x.rows() < 4)
        throw std::invalid_argument("independence_perm_test: at least 4 samples required");
    if (num_perms < 20)
        throw std::invalid_argument("independence_perm_test: num_perms must be >= 20");

    const Matrix gx = gram_matrix(spec_x, samples_x);
    const Matrix gy = gram_matrix(spec_y, samples_y);
    const double statistic = hsic_batch(gx, gy);

    const auto n = samples_x.rows();
    const Matrix cx = center_gram(gx, CenterMode::both);
    Rng rng(rng_seed);
    std::vector<int> perm(n);
    std::vector<double> draws(num_perms);
    for (int p = 0; p < num_perms; ++p) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(p + 1));
        std::iota(perm.begin(), perm.end(), 0);
        sub.shuffle(perm);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) acc += cx(i, j) * gy(perm[i], perm[j]);
        draws[p] = acc / (static_cast<double>(n) * static_cast<double>(n));
    }
    const double threshold = perm_quantile(draws, level);
    return {statistic, threshold, statistic > threshold};
}

}  // namespace rkhs
