import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critrans.model_zoo import normal_form_preset
from critrans.sde_engine import FastSlowSystem, Path, SimConfig, simulate_ensemble
from critrans.warning_signs import (CriticalManifold, Law, compare_laws, ensemble_pointwise_moments,
                                    ensemble_sliding_window_variance, fit_scaling, frozen_variance_scan,
                                    law_model, linear_fit, piecewise_linear_break, sliding_window_variance,
                                    trend_test)


def make_path(x, y=None):
    x = np.asarray(x, float)
    if x.ndim == 1:
        x = x[:, None]
    s = np.arange(len(x), dtype=float) * 0.01
    y = s.copy() if y is None else np.asarray(y, float)
    return Path(s, y[:, None], x, 0, 0)


def brute(x, s, window, linear):
    out = []
    for j in range(len(x) - window):
        seg = x[j:j + window + 1].copy()
        if linear:
            t = s[j:j + window + 1]
            for c in range(seg.shape[1]):
                a, b = np.polyfit(t, seg[:, c], 1)
                seg[:, c] -= a * t + b
        out.append(np.cov(seg.T, ddof=1).reshape(seg.shape[1], seg.shape[1]))
    return np.array(out)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10 ** 6), L=st.integers(12, 80), m=st.integers(1, 3),
       window=st.integers(2, 10), linear=st.booleans(), offset=st.floats(-1e3, 1e3))
def test_window_cov_matches_brute_force(seed, L, m, window, linear, offset):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(L, m)) + offset
    p = make_path(x)
    est = sliding_window_variance(p, window, "linear" if linear else None)
    ref = brute(x, p.s, window, linear)
    assert np.allclose(est.cov, ref, rtol=1e-7, atol=1e-9)
    assert est.y == pytest.approx(np.convolve(p.s, np.ones(window + 1) / (window + 1), "valid"))


def test_constant_series_zero_variance():
    p = make_path(np.full(300, 3.7))
    for d in (None, "linear", CriticalManifold(lambda y: np.full((len(y), 1), 1.0))):
        assert np.all(sliding_window_variance(p, 50, d).cov == 0.0)


def test_iid_window_variance():
    rng = np.random.default_rng(20240611)
    p = make_path(rng.normal(0.0, 0.2, size=5000))
    v = sliding_window_variance(p, 200).cov[:, 0, 0]
    assert v.mean() == pytest.approx(0.04, rel=0.05)
    # chi-square with 200 degrees of freedom: relative spread sqrt(2/200) = 10%
    assert v.std() / 0.04 == pytest.approx(0.1, rel=0.25)
    assert np.mean(np.abs(v / 0.04 - 1.0) <= 0.15) >= 0.8


def test_linear_trend_removed_exactly():
    s = np.arange(500) * 0.01
    p = make_path(2.0 * s + 3.0)
    est = sliding_window_variance(p, 100, "linear")
    assert np.max(np.abs(est.cov)) <= 1e-12
    assert est.method == "M2Linear"


def test_cm_detrend_subtracts_manifold():
    s = np.arange(400) * 0.01
    p = make_path(np.sin(s))
    est = sliding_window_variance(p, 40, CriticalManifold(lambda y: np.sin(y)))
    assert np.max(np.abs(est.cov)) <= 1e-28
    assert est.method == "M2CM"


def test_linear_detrend_idempotent():
    rng = np.random.default_rng(5)
    s = np.arange(101) * 0.01
    x = rng.normal(size=101) + 4.0 * s
    once = sliding_window_variance(make_path(x), 100, "linear").cov[0, 0, 0]
    a, b = np.polyfit(s, x, 1)
    twice = sliding_window_variance(make_path(x - a * s - b), 100, "linear").cov[0, 0, 0]
    assert abs(twice - once) <= 1e-12 * once


def test_window_errors():
    p = make_path(np.zeros(50))
    with pytest.raises(ValueError):
        sliding_window_variance(p, 60)
    with pytest.raises(ValueError):
        sliding_window_variance(p, 1)
    with pytest.raises(ValueError):
        sliding_window_variance(p, 10, "quadratic")


def ou_system(sigma=1.0):
    return FastSlowSystem(1, 1, lambda x, y: -x, lambda x, y: np.ones_like(y),
                          lambda x, y: np.ones((x.shape[0], 1, 1)), 1, 1.0, sigma)


def test_m3_identical_paths_zero():
    cfg = SimConfig(dt=0.01, s_end=1.0, n_paths=5)
    ens = simulate_ensemble(ou_system(sigma=0.0), cfg, [1.0], [0.0])
    assert np.all(ensemble_pointwise_moments(ens).cov == 0.0)


def test_m3_ou_stationary():
    cfg = SimConfig(dt=0.01, s_end=6.0, record_stride=100, n_paths=4000, master_seed=9)
    ens = simulate_ensemble(ou_system(), cfg, [0.0], [0.0])
    v = ensemble_pointwise_moments(ens).cov[-1, 0, 0]
    se = 0.5 * math.sqrt(2.0 / 4000)
    assert abs(v - 1.0 / (2.0 - 0.01)) <= 3 * se


@pytest.fixture(scope="module")
def fold_ensemble():
    pre = normal_form_preset("fold", eps=0.01, sigma=0.01, y0=(-1.2,), y_end=-0.2)
    # dt = eps/100 keeps the Euler variance bias (about theta*dt/(2 eps)) near 1%
    cfg = SimConfig(dt=1e-4, s_end=pre.defaults["s_end"], record_stride=10, master_seed=17, n_paths=400)
    return pre, simulate_ensemble(pre.system, cfg, pre.x0, pre.y0)


def test_m3_fold_matches_leading_order(fold_ensemble):
    pre, ens = fold_ensemble
    est = ensemble_pointwise_moments(ens).restrict(-1.0, -0.2)
    ratio = est.cov[:, 0, 0] / (0.01 ** 2 / (4 * np.sqrt(np.abs(est.y))))
    # bins of width 0.1 in y average out the per-point Monte-Carlo noise
    bins = np.digitize(est.y, np.linspace(-1.0, -0.2, 9))
    for b in np.unique(bins):
        assert abs(ratio[bins == b].mean() - 1.0) <= 0.1


def test_m2cm_agrees_with_m3(fold_ensemble):
    pre, ens = fold_ensemble
    cm = CriticalManifold(lambda Y: np.array([pre.branch_at(v) for v in Y]))
    W = 50
    m2 = ensemble_sliding_window_variance(ens, W, cm).restrict(-1.0, -0.3)
    m3 = ensemble_pointwise_moments(ens)
    ref = np.interp(m2.y, m3.y, m3.cov[:, 0, 0])
    band = 3 * ref * math.sqrt(2 / 400)
    # mean offset of x from h0 is not removed by CM detrending, so allow the O(eps) shift squared
    assert np.median(np.abs(m2.cov[:, 0, 0] - ref) / band) <= 1.0


def test_m4_fold_and_zero_noise():
    pre = normal_form_preset("fold", sigma=0.1)
    est = frozen_variance_scan(pre.system, [-0.25], 400.0, seed=1, replicates=8, x0=pre.branch_at)
    assert est.cov[0, 0, 0] == pytest.approx(0.005, rel=0.1)
    assert est.method == "M4"
    quiet = normal_form_preset("fold", sigma=0.0)
    assert np.all(frozen_variance_scan(quiet.system, [-0.25, -0.5], 50.0, x0=quiet.branch_at).cov == 0.0)
    with pytest.raises(ValueError):
        frozen_variance_scan(pre.system, [-0.25], 10.0, burn_in=10.0)


def test_fit_exact_inv_sqrt_rev():
    y = np.linspace(0.0, 0.8, 40)
    f = fit_scaling(y, 2.0 / np.sqrt(1.0 - y), "inv-sqrt-rev")
    assert f.converged
    assert f.A == pytest.approx(2.0, abs=1e-8) and f.y_c == pytest.approx(1.0, abs=1e-8)


def test_fit_exact_inv_rev():
    y = np.linspace(0.0, 0.4, 30)
    f = fit_scaling(y, 3.0 / (0.5 - y), Law.INV_REV)
    assert f.A == pytest.approx(3.0, abs=1e-8) and f.y_c == pytest.approx(0.5, abs=1e-8)


def test_fit_exact_inv_sqrt_from_above():
    y = np.linspace(0.95, 1.45, 30)
    f = fit_scaling(y, 0.01 / np.sqrt(y - 0.93), "inv-sqrt")
    assert f.y_c == pytest.approx(0.93, abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(c=st.floats(-5, 5), yc=st.floats(0.5, 2.0), A=st.floats(0.1, 10.0))
def test_fit_shift_equivariance(c, yc, A):
    y = np.linspace(0.0, 0.8 * yc, 25)
    rng = np.random.default_rng(1)
    V = A / (yc - y) * (1 + 0.01 * rng.normal(size=y.size))
    f0 = fit_scaling(y, V, "inv-rev")
    f1 = fit_scaling(y + c, V, "inv-rev")
    assert f1.y_c - c == pytest.approx(f0.y_c, abs=1e-9 * max(1.0, abs(c)) + 1e-9)
    assert f1.A == pytest.approx(f0.A, rel=1e-7)
    assert f1.rss == pytest.approx(f0.rss, rel=1e-6, abs=1e-18)


def test_reciprocal_transform_agrees():
    y = np.linspace(-0.3, -0.05, 40)
    V = 1.5 / (0.02 - y)
    f = fit_scaling(y, V, "inv-rev")
    root = linear_fit(y, 1.0 / V).root
    assert abs(root - f.y_c) <= 0.02 * abs(f.y_c) + 1e-12


def test_compare_laws_rankings():
    y = np.linspace(0.0, 0.9, 40)
    ranked = compare_laws(y, 1.0 / (1.0 - y), ["inv-sqrt-rev", "inv-rev"])
    assert ranked[0].law is Law.INV_REV
    flat = compare_laws(y, np.full_like(y, 2.0), ["linear", "inv-rev", "inv-sqrt-rev"])
    assert flat[0].law is Law.LINEAR and abs(flat[0].A) < 1e-12


def test_fit_validation():
    y = np.linspace(0, 1, 10)
    with pytest.raises(ValueError):
        fit_scaling(y, -np.ones(10), "inv-rev")
    with pytest.raises(ValueError):
        fit_scaling(y[:4], np.ones(4), "inv-rev")
    with pytest.raises(ValueError):
        fit_scaling(y, np.full(10, np.nan), "linear")
    # reciprocal-law failures are skipped by compare_laws, linear always fits
    assert [f.law for f in compare_laws(y, -np.ones(10), ["inv-rev", "linear"])] == [Law.LINEAR]


def test_law_model_sides():
    assert law_model("inv-sqrt", 1.25, 2.0, 1.0) == pytest.approx(4.0)
    assert law_model("inv-sqrt-rev", 0.75, 2.0, 1.0) == pytest.approx(4.0)
    assert law_model("inv", 1.5, 2.0, 1.0) == pytest.approx(4.0)
    assert law_model("inv-rev", 0.5, 2.0, 1.0) == pytest.approx(4.0)


def test_trend_labels():
    y = np.linspace(0, 1, 50)
    assert trend_test(y, y).label == "increasing"
    assert trend_test(y, -y).label == "decreasing"
    rng = np.random.default_rng(2)
    assert trend_test(y, rng.normal(size=50)).label == "trend-free"


def test_breakpoint_recovers_split():
    y = np.linspace(0.0, 1.0, 201)
    z = np.where(y < 0.6, 2.0 - 3.0 * y, 0.2 + 0.1 * (y - 0.6))
    bp = piecewise_linear_break(y, z)
    assert bp.y_break == pytest.approx(0.6, abs=0.01)
    assert bp.left.slope == pytest.approx(-3.0, rel=1e-6) and bp.left.r2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        piecewise_linear_break(y[:6], z[:6])
