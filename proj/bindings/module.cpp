#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rkhskit/adaptive.hpp"
#include "rkhskit/conditional.hpp"
#include "rkhskit/datagen.hpp"
#include "rkhskit/embeddings.hpp"
#include "rkhskit/experiments.hpp"
#include "rkhskit/finite_rkhs.hpp"
#include "rkhskit/independence.hpp"
#include "rkhskit/kbr.hpp"
#include "rkhskit/kernels.hpp"

namespace py = pybind11;
using namespace rkhs;

PYBIND11_MODULE(_core, m) {
    m.doc() = "RKHS numerics: kernels, embeddings, independence tests, "
              "kernel Bayes filtering and online kernel filters";

    py::class_<KernelSpec>(m, "KernelSpec")
        .def_static("linear", &KernelSpec::linear, py::arg("dim"))
        .def_static("gaussian", &KernelSpec::gaussian, py::arg("sigma2"), py::arg("dim"))
        .def_static("polynomial", &KernelSpec::polynomial, py::arg("degree"), py::arg("dim"))
        .def_static("min", &KernelSpec::min)
        .def_static("sinc", &KernelSpec::sinc, py::arg("band"))
        .def_readonly("input_dim", &KernelSpec::input_dim)
        .def_readonly("sigma2", &KernelSpec::sigma2);

    m.def("eval_kernel", &eval_kernel);
    m.def("gram_matrix", &gram_matrix);
    m.def("cross_gram", &cross_gram);
    m.def("center_gram", [](const Matrix& g) { return center_gram(g); });
    m.def("rkhs_distance_sq", &rkhs_distance_sq);
    m.def("gaussian_curve_length", &gaussian_curve_length);

    m.def("min_norm_linear_solve",
          [](const Matrix& a, const Vector& b) { return min_norm_linear_solve(a, b); });
    m.def("solve_via_frame", &solve_via_frame);
    m.def("min_norm_interpolate",
          [](const KernelSpec& spec, const Matrix& pts, const Vector& vals) {
              const auto r = min_norm_interpolate(spec, pts, vals);
              return py::make_tuple(r.alpha, r.norm_sq);
          });
    m.def("mercer_min_kernel", [](int grid, int k) {
        py::list out;
        for (const auto& p : mercer_min_kernel(grid, k))
            out.append(py::make_tuple(p.value, p.vector));
        return out;
    });

    m.def("mmd_sq", &mmd_sq);
    m.def("apply_reg_inverse", &apply_reg_inverse);
    m.def("deflection_detector",
          [](const Vector& mu0, const Vector& mu1, const Matrix& sigma0, double lam) {
              const auto r = deflection_detector(mu0, mu1, sigma0, lam);
              return py::make_tuple(r.detector, r.d_max);
          },
          py::arg("mu0"), py::arg("mu1"), py::arg("sigma0"), py::arg("reg_lambda") = 0.0);

    m.def("hsic_batch", &hsic_batch);
    m.def("max_correlation", &max_correlation);
    m.def("independence_perm_test",
          [](const Matrix& x, const Matrix& y, const KernelSpec& sx, const KernelSpec& sy,
             int perms, double level, std::uint64_t seed) {
              const auto r = independence_perm_test(x, y, sx, sy, perms, level, seed);
              return py::make_tuple(r.statistic, r.threshold, r.reject);
          });

    py::class_<HsicDictionary>(m, "HsicDictionary")
        .def(py::init(&make_hsic_dictionary), py::arg("mu"))
        .def_readonly("n", &HsicDictionary::n)
        .def("dict_size", &HsicDictionary::dict_size)
        .def("update", [](HsicDictionary& d, const Vector& x, const Vector& y,
                          const KernelSpec& sx, const KernelSpec& sy) {
            return sparse_hsic_update(d, x, y, sx, sy);
        });

    py::class_<CondTestConfig>(m, "CondTestConfig")
        .def(py::init<>())
        .def_readwrite("reg_lambda", &CondTestConfig::reg_lambda)
        .def_readwrite("num_domains", &CondTestConfig::num_domains)
        .def_readwrite("num_perms", &CondTestConfig::num_perms)
        .def_readwrite("level", &CondTestConfig::level)
        .def_readwrite("use_normalized", &CondTestConfig::use_normalized);
    m.def("cond_hs_norm", &cond_hs_norm);
    m.def("extended_cond_measure", &extended_cond_measure);
    m.def("markov_cond_test",
          [](const Matrix& x, const Matrix& y, const Matrix& z, const KernelSpec& sx,
             const KernelSpec& sy, const KernelSpec& sz, const CondTestConfig& cfg,
             std::uint64_t seed) {
              const auto r = markov_cond_test(x, y, z, sx, sy, sz, cfg, seed);
              return py::make_tuple(r.statistic, r.threshold, r.reject);
          });

    py::class_<KbrModel>(m, "KbrModel").def_property_readonly("n", &KbrModel::n);
    py::class_<KbrState>(m, "KbrState")
        .def_readonly("alpha", &KbrState::alpha)
        .def_readonly("step", &KbrState::step);
    m.def("build_kbr_model", &build_kbr_model);
    m.def("kbr_filter_init", &kbr_filter_init);
    m.def("kbr_filter_step", &kbr_filter_step);
    m.def("kbr_posterior", &kbr_posterior);
    m.def("preimage",
          [](const Vector& alpha, const Matrix& pts, const KernelSpec& spec, int iters,
             int restarts, double tol, std::uint64_t seed) {
              const auto r = preimage(alpha, pts, spec, iters, restarts, tol, seed);
              return py::make_tuple(r.point, r.converged, r.residual);
          });

    py::class_<KrlsState>(m, "KrlsState")
        .def_property_readonly("dict_size",
                               [](const KrlsState& s) { return s.dict_points.rows(); })
        .def_readonly("alpha", &KrlsState::alpha)
        .def_readonly("n", &KrlsState::n);
    py::class_<KlmsState>(m, "KlmsState")
        .def_property_readonly("dict_size",
                               [](const KlmsState& s) { return s.dict_points.rows(); })
        .def_readonly("alpha", &KlmsState::alpha)
        .def_readonly("n", &KlmsState::n);
    m.def("krls_init", &krls_init);
    m.def("krls_step", [](KrlsState& s, const Vector& x, double y, const KernelSpec& spec) {
        const auto r = krls_step(s, x, y, spec);
        return py::make_tuple(r.prediction, r.ald_error);
    });
    m.def("klms_init", &klms_init);
    m.def("klms_step", [](KlmsState& s, const Vector& x, double y, const KernelSpec& spec) {
        const auto r = klms_step(s, x, y, spec);
        return py::make_tuple(r.prediction, r.ald_error);
    });
    m.def("krls_predict", [](const KrlsState& s, const Vector& x, const KernelSpec& spec) {
        return adaptive_predict(s, x, spec);
    });
    m.def("klms_predict", [](const KlmsState& s, const Vector& x, const KernelSpec& spec) {
        return adaptive_predict(s, x, spec);
    });

    m.def("gen_rotation_pair", &gen_rotation_pair);
    m.def("gen_markov_triple", [](int n, double a, std::uint64_t seed) {
        const auto t = gen_markov_triple(n, a, seed);
        return py::make_tuple(t.x, t.y, t.z);
    });
    m.def("gen_nl_ar", &gen_nl_ar);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("experiment", &ExperimentConfig::experiment)
        .def_readwrite("n_samples", &ExperimentConfig::n_samples)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("sigma2", &ExperimentConfig::sigma2)
        .def_readwrite("mu", &ExperimentConfig::mu)
        .def_readwrite("e0", &ExperimentConfig::e0)
        .def_readwrite("reg_lambda", &ExperimentConfig::reg_lambda)
        .def_readwrite("reg_epsilon", &ExperimentConfig::reg_epsilon)
        .def_readwrite("num_domains", &ExperimentConfig::num_domains)
        .def_readwrite("num_perms", &ExperimentConfig::num_perms)
        .def_readwrite("level", &ExperimentConfig::level)
        .def_readwrite("coupling", &ExperimentConfig::coupling)
        .def_readwrite("theta_steps", &ExperimentConfig::theta_steps)
        .def_readwrite("output_path", &ExperimentConfig::output_path);
    m.def("run_experiment", &run_experiment);
}
