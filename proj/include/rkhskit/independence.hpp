#pragma once

#include <cstdint>
#include <vector>

#include "rkhskit/kernels.hpp"

namespace rkhs {

// Empirical HSIC, biased V-statistic: (1/N^2) Tr(C K_x C K_y).
double hsic_batch(const Matrix& gram_x, const Matrix& gram_y);

// Spectral estimate of the maximal correlation:
// (1/N) * largest singular value of K_x^{1/2} C K_y^{1/2}.
// Tiny negative Gram eigenvalues are clipped before the square roots.
double max_correlation(const Matrix& gram_x, const Matrix& gram_y);

// Running state of the recursive sparse HSIC with coherence dictionary.
// Streams are scalar-or-vector pairs; the retained atoms, their selection
// counts pi and the running vectors v grow only when a sample is
// sufficiently incoherent with every retained atom.
struct HsicDictionary {
    std::vector<int> indices;  // 1-based stream positions of retained atoms
    Matrix atoms_x;            // one retained sample per row
    Matrix atoms_y;
    Vector counts;             // pi, one per atom; sums to n
    Vector v_x, v_y;
    double norm_sq_Myx = 0.0;
    double norm_sq_mx = 0.0;
    double norm_sq_my = 0.0;
    double cross_c = 0.0;
    double mu = 1.0;           // coherence threshold in (0, 1]
    int n = 0;                 // samples seen

    int dict_size() const { return static_cast<int>(indices.size()); }
};

HsicDictionary make_hsic_dictionary(double mu);

// One stream step; returns the running estimate H_hat_n.  With mu = 1 the
// estimate equals hsic_batch on the first n samples.
double sparse_hsic_update(HsicDictionary& state, const Vector& x_n, const Vector& y_n,
                          const KernelSpec& spec_x, const KernelSpec& spec_y);

struct PermTestResult {
    double statistic;
    double threshold;
    bool reject;
};

// Permutation-calibrated HSIC independence test: the threshold is the
// empirical (1 - level) quantile of the statistic over num_perms
// permutations of the y samples (ceil order-statistic convention).
PermTestResult independence_perm_test(const Matrix& samples_x, const Matrix& samples_y,
                                      const KernelSpec& spec_x, const KernelSpec& spec_y,
                                      int num_perms, double level, std::uint64_t rng_seed);

// Quantile rule shared by the permutation tests: 1-based index
// max(1, ceil((1 - level) * n)) of the ascending order statistics.
double perm_quantile(std::vector<double>& draws, double level);

}  // namespace rkhs
