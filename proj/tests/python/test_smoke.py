"""Smoke tests for the python bindings; runs against the build-tree module."""

import math

import numpy as np

import rkhskit as rk


def test_gram_matrix():
    spec = rk.KernelSpec.gaussian(1.0, 2)
    pts = np.random.default_rng(0).normal(size=(30, 2))
    g = rk.gram_matrix(spec, pts)
    assert g.shape == (30, 30)
    assert np.allclose(g, g.T)
    assert np.linalg.eigvalsh(g).min() >= -1e-9 * 30
    assert np.allclose(np.diag(g), 1.0)


def test_min_norm_solve_matches_numpy():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(3, 7))
    b = rng.normal(size=3)
    x = rk.min_norm_linear_solve(a, b)
    assert np.allclose(x, np.linalg.pinv(a) @ b, atol=1e-8)
    assert np.allclose(rk.solve_via_frame(a, b), x, atol=1e-8)


def test_mercer_eigenvalues():
    pairs = rk.mercer_min_kernel(800, 3)
    for k, (value, _vec) in enumerate(pairs, start=1):
        analytic = 1.0 / ((k - 0.5) * math.pi) ** 2
        assert abs(value - analytic) / analytic < 0.02


def test_hsic_separates_dependence():
    spec = rk.KernelSpec.gaussian(0.5, 1)
    x, y = rk.gen_rotation_pair(512, math.pi / 4, 3)
    stat, threshold, reject = rk.independence_perm_test(
        x.reshape(-1, 1), y.reshape(-1, 1), spec, spec, 100, 0.05, 4
    )
    assert reject and stat > threshold
    x0, y0 = rk.gen_rotation_pair(512, 0.0, 5)
    stat0, thr0, reject0 = rk.independence_perm_test(
        x0.reshape(-1, 1), y0.reshape(-1, 1), spec, spec, 100, 0.05, 6
    )
    assert not reject0


def test_sparse_hsic_exactness():
    spec = rk.KernelSpec.gaussian(0.5, 1)
    rng = np.random.default_rng(7)
    xs = rng.normal(size=60)
    ys = 0.5 * xs + rng.normal(size=60)
    d = rk.HsicDictionary(1.0)
    h = 0.0
    for i in range(60):
        h = d.update(np.array([xs[i]]), np.array([ys[i]]), spec, spec)
    gx = rk.gram_matrix(spec, xs.reshape(-1, 1))
    gy = rk.gram_matrix(spec, ys.reshape(-1, 1))
    assert abs(h - rk.hsic_batch(gx, gy)) < 1e-8
    assert d.dict_size() == 60


def test_krls_linear_fit():
    # 1-D linear kernel: later atoms are linearly dependent, so the ALD
    # threshold sits just above rounding noise to take the accept branch
    spec = rk.KernelSpec.linear(1)
    state = rk.krls_init(np.array([1.0]), 2.0, spec, 1e-6)
    rng = np.random.default_rng(8)
    for _ in range(9):
        x = rng.uniform(-3, 3)
        rk.krls_step(state, np.array([x]), 2.0 * x, spec)
    assert abs(rk.krls_predict(state, np.array([3.0]), spec) - 6.0) < 1e-5


def test_kbr_filter_runs():
    spec = rk.KernelSpec.gaussian(0.5, 1)
    z = rk.gen_nl_ar(80, 0.1, 9)
    train_x = z[:60].reshape(-1, 1)
    train_y = z[:60].reshape(-1, 1)
    model = rk.build_kbr_model(train_x, train_y, spec, spec, 1e-4, 1e-4)
    state = rk.kbr_filter_init(model, np.array([z[59]]))
    for k in range(60, 70):
        state = rk.kbr_filter_step(model, state, np.array([z[k]]))
    assert np.all(np.isfinite(state.alpha))
    point, converged, residual = rk.preimage(
        state.alpha, train_x[:59], spec, 200, 5, 1e-6, 10
    )
    assert np.all(np.isfinite(point))


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
