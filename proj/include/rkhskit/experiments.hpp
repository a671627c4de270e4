#pragma once

#include <cstdint>
#include <string>

namespace rkhs {

// Named desk-scale experiments driven by the CLI; every run writes one CSV
// (header row, LF endings, 12 significant digits) and prints a one-line
// summary.  Identical configs produce byte-identical files.
struct ExperimentConfig {
    std::string experiment;  // hsic-rotation | markov-test | kbr-predict
                             // | krls-predict | klms-predict | mercer-check
                             // | deflection-demo
    int n_samples = 512;
    std::uint64_t seed = 1;
    double sigma2 = -1.0;    // gaussian bandwidth; < 0 means experiment default
    int degree = 2;
    double mu = 0.95;        // sparse HSIC coherence threshold
    double e0 = -1.0;        // adaptive-filter threshold; < 0 means default
    double reg_lambda = -1.0;
    double reg_epsilon = -1.0;
    int num_domains = 8;
    int num_perms = 100;
    double level = 0.05;
    double coupling = 0.5;
    int theta_steps = 19;
    std::string output_path;  // empty: "<experiment>.csv"
};

// Returns the process exit code: 0 success, 2 invalid configuration,
// 3 numerical failure.
int run_experiment(const ExperimentConfig& config);

}  // namespace rkhs
