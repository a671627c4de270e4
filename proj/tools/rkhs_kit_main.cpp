#include <CLI11.hpp>

#include "rkhskit/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"rkhs-kit: kernel-method experiment harness"};
    rkhs::ExperimentConfig cfg;

    app.add_option("experiment", cfg.experiment,
                   "one of: hsic-rotation, markov-test, kbr-predict, krls-predict, "
                   "klms-predict, mercer-check, deflection-demo")
        ->required();
    app.add_option("--n", cfg.n_samples, "sample count / training size");
    app.add_option("--seed", cfg.seed, "64-bit RNG seed");
    app.add_option("--sigma2", cfg.sigma2, "gaussian bandwidth (exp(-r^2/(2 sigma2)))");
    app.add_option("--mu", cfg.mu, "sparse HSIC coherence threshold in (0,1]");
    app.add_option("--e0", cfg.e0, "adaptive filter threshold");
    app.add_option("--lambda", cfg.reg_lambda, "regularizer / kLMS step size");
    app.add_option("--epsilon", cfg.reg_epsilon, "secondary regularizer / kLMS stabilizer");
    app.add_option("--domains", cfg.num_domains, "conditioning domains L");
    app.add_option("--perms", cfg.num_perms, "permutation replicas");
    app.add_option("--level", cfg.level, "test level in (0,1)");
    app.add_option("--coupling", cfg.coupling, "Markov chain coupling a");
    app.add_option("--theta-steps", cfg.theta_steps, "rotation sweep grid size");
    app.add_option("--out", cfg.output_path, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return rkhs::run_experiment(cfg);
}
