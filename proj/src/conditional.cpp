#include "rkhskit/conditional.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "rkhskit/parallel.hpp"
#include "rkhskit/rng.hpp"

namespace rkhs {

namespace {

void validate(const CondTestConfig& config) {
    if (config.reg_lambda <= 0.0)
        throw std::invalid_argument("conditional test: reg_lambda must be > 0");
    if (config.num_domains < 1)
        throw std::invalid_argument("conditional test: num_domains must be >= 1");
    if (config.num_perms < 1)
        throw std::invalid_argument("conditional test: num_perms must be >= 1");
    if (config.level <= 0.0 || config.level >= 1.0)
        throw std::invalid_argument("conditional test: level must lie in (0, 1)");
}

// y/z-dependent factor M of the trace formula; the measure is then
// Tr(g(Kc_x) M) where only the x side changes under permutation replicas.
struct CondContext {
    Matrix M;
    double reg_lambda;
    bool normalized;
    Eigen::Index n;

    CondContext(const Matrix& gram_y, const Matrix& gram_z, double lambda, bool norm)
        : reg_lambda(lambda), normalized(norm), n(gram_y.rows()) {
        const double nl = static_cast<double>(n) * lambda;
        const Matrix cy = center_gram(gram_y, CenterMode::both);
        const Matrix cz = center_gram(gram_z, CenterMode::both);
        const Matrix reg_z = cz + nl * Matrix::Identity(n, n);
        if (normalized) {
            const Matrix ny = cy * Eigen::LLT<Matrix>(cy + nl * Matrix::Identity(n, n))
                                       .solve(Matrix::Identity(n, n));
            const Matrix nz = cz * Eigen::LLT<Matrix>(reg_z).solve(Matrix::Identity(n, n));
            M = ny - 2.0 * ny * nz + nz * ny * nz;
        } else {
            const Matrix w = Eigen::LLT<Matrix>(reg_z).solve(cz);  // Kr_z^{-1} Kc_z
            M = cy - 2.0 * cy * w + w.transpose() * cy * w;
        }
    }

    double measure(const Matrix& gram_x_side) const {
        const Matrix cx = center_gram(gram_x_side, CenterMode::both);
        if (normalized) {
            const double nl = static_cast<double>(n) * reg_lambda;
            const Matrix s =
                Eigen::LLT<Matrix>(cx + nl * Matrix::Identity(n, n)).solve(M);
            return cx.cwiseProduct(s.transpose()).sum();  // Tr(Kc_x Kr_x^{-1} M)
        }
        return cx.cwiseProduct(M.transpose()).sum() / static_cast<double>(n * n);
    }
};

Matrix permuted_hadamard(const Matrix& gram_x, const Matrix& gram_z,
                         const std::vector<int>& perm) {
    const auto n = gram_x.rows();
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            g(i, j) = gram_x(perm[i], perm[j]) * gram_z(i, j);
    return g;
}

}  // namespace

double cond_hs_norm(const Matrix& gram_x, const Matrix& gram_y, const Matrix& gram_z,
                    double reg_lambda, bool normalized) {
    const auto n = gram_x.rows();
    if (gram_x.cols() != n || gram_y.rows() != n || gram_y.cols() != n ||
        gram_z.rows() != n || gram_z.cols() != n)
        throw std::invalid_argument("cond_hs_norm: Gram matrices must be square, equal size");
    if (reg_lambda <= 0.0)
        throw std::invalid_argument("cond_hs_norm: reg_lambda must be > 0");
    const CondContext ctx(gram_y, gram_z, reg_lambda, normalized);
    return ctx.measure(gram_x);
}

double extended_cond_measure(const Matrix& samples_x, const Matrix& samples_y,
                             const Matrix& samples_z, const KernelSpec& spec_x,
                             const KernelSpec& spec_y, const KernelSpec& spec_z,
                             const CondTestConfig& config) {
    validate(config);
    if (samples_x.rows() != samples_y.rows() || samples_x.rows() != samples_z.rows())
        throw std::invalid_argument("extended_cond_measure: sample count mismatch");
    const Matrix gx = gram_matrix(spec_x, samples_x);
    const Matrix gy = gram_matrix(spec_y, samples_y);
    const Matrix gz = gram_matrix(spec_z, samples_z);
    return cond_hs_norm(gx.cwiseProduct(gz), gy, gz, config.reg_lambda,
                        config.use_normalized);
}

std::vector<std::vector<int>> z_domains(const Matrix& samples_z, int num_domains) {
    const auto n = samples_z.rows();
    if (num_domains < 1 || static_cast<Eigen::Index>(num_domains) * 4 > n)
        throw std::invalid_argument("z_domains: each domain needs at least 4 points");
    Vector key;
    if (samples_z.cols() == 1) {
        key = samples_z.col(0);
    } else {
        // sort on the first principal coordinate of the conditioning variable
        Matrix centered = samples_z.rowwise() - samples_z.colwise().mean();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(centered.transpose() * centered);
        key = centered * eig.eigenvectors().col(samples_z.cols() - 1);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return key[a] < key[b]; });
    std::vector<std::vector<int>> domains(num_domains);
    const auto base = n / num_domains;
    const auto extra = n % num_domains;
    Eigen::Index pos = 0;
    for (int d = 0; d < num_domains; ++d) {
        const auto size = base + (d < extra ? 1 : 0);
        domains[d].assign(order.begin() + pos, order.begin() + pos + size);
        pos += size;
    }
    return domains;
}

double cond_perm_threshold(const Matrix& samples_x, const Matrix& samples_y,
                           const Matrix& samples_z, const KernelSpec& spec_x,
                           const KernelSpec& spec_y, const KernelSpec& spec_z,
                           const CondTestConfig& config, std::uint64_t rng_seed) {
    validate(config);
    const auto n = samples_x.rows();
    if (samples_y.rows() != n || samples_z.rows() != n)
        throw std::invalid_argument("cond_perm_threshold: sample count mismatch");

    const Matrix gx = gram_matrix(spec_x, samples_x);
    const Matrix gy = gram_matrix(spec_y, samples_y);
    const Matrix gz = gram_matrix(spec_z, samples_z);
    const CondContext ctx(gy, gz, config.reg_lambda, config.use_normalized);
    const auto domains = z_domains(samples_z, config.num_domains);

    const Rng root(rng_seed);
    std::vector<double> draws(config.num_perms);
    parallel_for(static_cast<std::size_t>(config.num_perms), [&](std::size_t p) {
        Rng sub = root.substream(static_cast<std::uint64_t>(p + 1));
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (const auto& domain : domains) {
            std::vector<int> shuffled = domain;
            sub.shuffle(shuffled);
            for (std::size_t k = 0; k < domain.size(); ++k) perm[domain[k]] = shuffled[k];
        }
        draws[p] = ctx.measure(permuted_hadamard(gx, gz, perm));
    });
    return perm_quantile(draws, config.level);
}

PermTestResult markov_cond_test(const Matrix& samples_x, const Matrix& samples_y,
                                const Matrix& samples_z, const KernelSpec& spec_x,
                                const KernelSpec& spec_y, const KernelSpec& spec_z,
                                const CondTestConfig& config, std::uint64_t rng_seed) {
    const double statistic = extended_cond_measure(samples_x, samples_y, samples_z, spec_x,
                                                   spec_y, spec_z, config);
    const double threshold = cond_perm_threshold(samples_x, samples_y, samples_z, spec_x,
                                                 spec_y, spec_z, config, rng_seed);
    return {statistic, threshold, statistic > threshold};
}

}  // namespace rkhs
