import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critrans.model_zoo import (PRESETS, BTLocatorError, NoiseShape, activator_inhibitor, bazykin,
                                classify_eigenvalues, correlated_noise_factor, equilibrium_branch_sweep,
                                euler_buckling, goldbeter_koshland, goldbeter_koshland_du, numeric_jacobian,
                                sis_adaptive, stommel_cessi)
from critrans.sde_engine import SimConfig, euler_maruyama


# Stommel-Cessi

def test_stommel_fold_points():
    an = stommel_cessi().analytics
    (xm, ym), (xp, yp) = an.fold_points()
    assert xp == pytest.approx((10 + math.sqrt(15)) / 15, abs=1e-14)
    assert yp == pytest.approx(11 / 9 - 1 / math.sqrt(15), abs=1e-14)
    assert (round(xp, 4), round(yp, 4)) == (0.9249, 0.9640)
    assert xm < xp and ym > yp


def test_stommel_h0_and_fold_eigenvalue():
    an = stommel_cessi().analytics
    assert an.h0(1.0) == 1.0
    assert abs(an.jacobian(an.fold_points()[1][0])) <= 1e-10
    assert an.upper_branch(1.0) == pytest.approx(1.0, abs=1e-13)
    with pytest.raises(ValueError):
        an.upper_branch(0.9)


def test_stommel_defaults():
    pre = stommel_cessi()
    assert pre.params == {"eta2": 7.5, "eps": 0.01, "sigma": 0.01}
    x, y = np.array([[0.9]]), np.array([[1.2]])
    assert pre.system.g(x, y)[0, 0] == -1.0
    assert pre.system.drift(x, y)[0] == pytest.approx(1.2 - 0.9 * (1 + 7.5 * 0.01))


# SIS

def test_sis_threshold_and_jacobian():
    an = sis_adaptive().analytics
    assert an.threshold == pytest.approx(0.0201, abs=1e-15)
    for y in (0.0, 0.01, an.threshold, 0.05):
        ev = np.linalg.eigvals(an.jacobian(y))
        assert np.min(np.abs(ev + 0.002)) <= 1e-12
    assert abs(np.linalg.det(an.jacobian(an.threshold)[1:, 1:])) <= 1e-15
    assert np.array_equal(an.trivial_branch(), [0.0, 0.0, 10.0])


def test_sis_jacobian_matches_drift():
    pre = sis_adaptive()
    f1 = lambda x, y: pre.system.drift(x, y)
    for y in (0.01, 0.03):
        J = numeric_jacobian(f1, pre.x0, np.array([y]))
        assert np.allclose(J, pre.analytics.jacobian(y), atol=1e-7)


def test_sis_box_is_conserved():
    pre = sis_adaptive(sigmas=(0.1, 0.1, 0.1))
    cfg = SimConfig(dt=1e-4, s_end=0.03, master_seed=2)
    p = euler_maruyama(pre.system, cfg, pre.x0, pre.y0)
    assert np.all((p.x >= 0) & (p.x <= [1.0, 10.0, 10.0]))


# Goldbeter-Koshland

def test_gk_examples():
    assert goldbeter_koshland(1.0, 1.0, 0.3, 0.3) == pytest.approx(0.5, abs=1e-15)
    assert goldbeter_koshland(0.0, 1.0, 0.3, 0.3) == 0.0
    u, v, J, K = 0.2, 1.0, 0.3, 0.3
    B = v - u + v * J + u * K
    D = B * B - 4 * (v - u) * u * K
    conj = (B - math.sqrt(D)) / (2 * (v - u))
    assert abs(goldbeter_koshland(u, v, J, K) - conj) <= 1e-14


def test_gk_no_cancellation_for_large_u():
    # u >> v makes B negative; the result must still solve the quadratic to round-off
    u, v, J, K = 50.0, 1.0, 0.3, 0.3
    G = goldbeter_koshland(u, v, J, K)
    B = v - u + v * J + u * K
    assert 0.0 < G <= 1.0
    assert abs((v - u) * G * G - B * G + u * K) <= 1e-12 * abs(u * K)


def test_gk_monotone_and_bounded():
    u = np.linspace(1e-6, 2.0, 2001)
    G = goldbeter_koshland(u, 1.0, 0.3, 0.3)
    assert np.all(np.diff(G) > 0)
    assert np.all((G >= 0) & (G <= 1))


@settings(max_examples=60, deadline=None)
@given(u=st.floats(0.01, 5.0), v=st.floats(0.01, 5.0), J=st.floats(0.05, 2.0), K=st.floats(0.05, 2.0))
def test_gk_derivative(u, v, J, K):
    h = 1e-6 * max(1.0, u)
    fd = (goldbeter_koshland(u + h, v, J, K) - goldbeter_koshland(u - h, v, J, K)) / (2 * h)
    assert goldbeter_koshland_du(u, v, J, K) == pytest.approx(fd, rel=1e-5, abs=1e-8)


def test_gk_errors():
    with pytest.raises(ValueError):
        goldbeter_koshland(1.0, 1.0, 0.0, 0.3)
    with pytest.raises(ValueError):
        goldbeter_koshland(-1.0, 1.0, 0.3, 0.3)


# activator-inhibitor

def test_activator_inhibitor_manifold_ratio():
    an = activator_inhibitor().analytics
    x1 = np.linspace(0.01, 3.0, 50)
    x2, y = an.manifold(x1)
    assert np.allclose(x2 / x1, 4.0 / 3.0, rtol=1e-15)
    expected = x1 + 4.0 / 3.0 * x1 ** 2 - 4.0 * goldbeter_koshland(x1, 1.0, 0.3, 0.3)
    assert np.allclose(y, expected, atol=1e-14)
    pre = activator_inhibitor()
    for v, yv in zip(x1[::10], y[::10]):
        r = pre.system.drift(np.array([[v, 4 * v / 3]]), np.array([[yv]]))
        assert np.max(np.abs(r)) <= 1e-13


def test_activator_inhibitor_hopf_points():
    an = activator_inhibitor().analytics
    hp = an.hopf_points()
    assert len(hp) == 2
    pre = activator_inhibitor()
    for x1, x2, y in hp:
        J = numeric_jacobian(lambda x, yy: pre.system.drift(x, yy), np.array([x1, x2]), np.array([y]))
        assert abs(np.trace(J)) <= 1e-8
        assert np.linalg.det(J) > 0
    # values of the model with the stated rate constants (see the decisions ledger)
    assert hp[0][2] == pytest.approx(0.0743210, abs=1e-6)
    assert hp[1][2] == pytest.approx(0.4025602, abs=1e-6)


def test_activator_inhibitor_trace_bisection():
    an = activator_inhibitor().analytics
    lo, hi = 0.2, 0.4
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if (an.trace_on_manifold(mid) < 0) == (an.trace_on_manifold(lo) < 0):
            lo = mid
        else:
            hi = mid
    assert lo == pytest.approx(an.hopf_points()[0][0], abs=2e-9)


def test_correlated_noise_factor():
    F = correlated_noise_factor([[1.0, 0.2], [0.2, 1.0]])
    assert np.allclose(F @ F.T, [[1.0, 0.2], [0.2, 1.0]], atol=1e-15)
    assert F[0, 1] == 0.0


# Bazykin

@pytest.fixture(scope="module")
def baz():
    return bazykin().analytics


@pytest.mark.parametrize("which,cond", [("h", np.trace), ("lp", np.linalg.det)])
def test_bazykin_curves_match_conditions(baz, which, cond):
    y1 = 0.35
    roots = [r for r in baz.curve_y2(which, y1) if r > 0]
    assert roots
    for y2 in roots:
        y = np.array([y1, y2])
        eq = baz.interior_equilibria(y)
        assert min(abs(cond(baz.jacobian(x, y))) for x in eq) <= 1e-6
        assert abs(baz.scaled_value(which, y1, y2)) <= 1e-9


def test_bazykin_spiral_sink_in_q2(baz):
    y = np.array([0.35, 0.3])
    x = baz.attracting_equilibrium(y)
    ev = np.linalg.eigvals(baz.jacobian(x, y))
    assert np.all(ev.real < 0) and np.all(np.abs(ev.imag) > 0)
    assert np.max(np.abs(baz.drift(x, y))) <= 1e-12


def test_bazykin_bt_point(baz):
    z = baz.bt_state()
    J = baz.jacobian(z[:2], z[2:])
    assert abs(np.trace(J)) <= 1e-9 and abs(np.linalg.det(J)) <= 1e-9
    assert abs(baz.scaled_value("lp", *z[2:])) <= 1e-7
    assert abs(baz.scaled_value("h", *z[2:])) <= 1e-7


def test_bazykin_slow_path_ends_at_bt(baz):
    path = baz.slow_path()
    bt = baz.bt_point()
    assert path.y1_start == pytest.approx(0.3)
    assert path.poly(0.3) == pytest.approx(0.3293, abs=1e-10)
    assert path.poly(bt[0]) == pytest.approx(bt[1], abs=1e-10)
    with pytest.raises(ValueError):
        baz.slow_path(waypoints=[[0.5, 0.2], [0.4, 0.2]])


def test_bazykin_locator_failure():
    with pytest.raises(BTLocatorError):
        bazykin().analytics.bt_point(y1_range=(5.0, 6.0), grid=5)


# Euler buckling

def test_buckling_threshold_and_shapes():
    pre = euler_buckling()
    assert pre.analytics.threshold == 3.3
    assert pre.analytics.shapes_equal_at == pytest.approx(2.3)
    behav = {s: euler_buckling(noise_shape=s.value).analytics.behavior() for s in NoiseShape}
    assert behav == {NoiseShape.CONST: "increasing", NoiseShape.SQRT_GAP: "trend-free",
                     NoiseShape.LINEAR_GAP: "decreasing"}
    y = np.array([2.3])
    vals = [euler_buckling(noise_shape=s.value).analytics.predicted_variance(y, 0.007)[0] for s in NoiseShape]
    assert vals[0] == pytest.approx(vals[1], rel=1e-12) and vals[1] == pytest.approx(vals[2], rel=1e-12)


def test_buckling_predicted_variance_shapes():
    y = np.array([2.0, 2.5, 3.0, 3.2])
    lin = euler_buckling(noise_shape="linear-gap").analytics.predicted_variance(y, 1.0)
    sq = euler_buckling(noise_shape="sqrt-gap").analytics.predicted_variance(y, 1.0)
    assert np.allclose(lin, (3.3 - y) / (2 * 2.639))
    assert np.allclose(sq, 1 / (2 * 2.639))


# all presets

@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_deterministic_run_stays_near_branch(name):
    quiet = {"sis": {"sigmas": (0.0, 0.0, 0.0)}, "bazykin": {"sigmas": (0.0, 0.0)}}
    pre = PRESETS[name](**quiet.get(name, {"sigma": 0.0}))
    eps = pre.system.eps
    s_end = min(abs(pre.defaults["s_end"]), 10000 * pre.defaults["dt"])
    cfg = SimConfig(dt=pre.defaults["dt"], s_end=s_end, record_stride=10)
    p = euler_maruyama(pre.system, cfg, pre.x0, pre.y0)
    dev = [np.max(np.abs(p.x[i] - pre.branch_at(p.y[i]))) for i in range(0, len(p.s), max(1, len(p.s) // 20))]
    # slow-manifold lag is eps * g * dh/dy / |fast rate|; the weakest rate among presets needs C near 60
    assert max(dev) <= 100 * eps + 1e-12


def test_presets_are_pure():
    a, b = stommel_cessi(), stommel_cessi()
    assert a.params == b.params and np.array_equal(a.x0, b.x0)


# branch sweep

def test_sweep_sis_transcritical():
    pre = sis_adaptive()
    br = equilibrium_branch_sweep(pre.system, lambda t: [0.005 + 0.035 * t], 101, pre.x0)
    (ev,) = br.detected_events
    assert ev.kind == "zero-eigenvalue"
    assert ev.y[0] == pytest.approx(0.0201, abs=1e-4)
    assert br.stability[0] == "Attracting" and br.stability[-1] == "Saddle"


def test_sweep_activator_inhibitor_hopf():
    pre = activator_inhibitor()
    br = equilibrium_branch_sweep(pre.system, lambda t: [0.02 + 0.13 * t], 131, pre.branch_at([0.02]))
    (ev,) = br.detected_events
    assert ev.kind == "hopf" and ev.imag > 1e-6
    assert ev.y[0] == pytest.approx(pre.analytics.hopf_points()[0][2], abs=1e-4)


def test_sweep_stommel_termination():
    pre = stommel_cessi()
    br = equilibrium_branch_sweep(pre.system, lambda t: [1.5 - 0.6 * t], 121, pre.x0)
    assert br.detected_events[-1].kind == "termination"
    assert br.detected_events[-1].y[0] == pytest.approx(0.9640, abs=1e-3)
    assert all(s == "Attracting" for s in br.stability)


def test_sweep_stability_matches_eigenvalues():
    pre = sis_adaptive()
    br = equilibrium_branch_sweep(pre.system, lambda t: [0.005 + 0.035 * t], 31, pre.x0)
    for y, lab in zip(br.y_grid, br.stability):
        assert lab == classify_eigenvalues(np.linalg.eigvals(pre.analytics.jacobian(y)))


def test_sweep_bad_seed():
    pre = stommel_cessi()
    with pytest.raises(ValueError):
        equilibrium_branch_sweep(pre.system, lambda t: [1.5 - 0.6 * t], 10, [np.nan])


def test_classify_labels():
    assert classify_eigenvalues([-1, -2]) == "Attracting"
    assert classify_eigenvalues([1, 2]) == "Repelling"
    assert classify_eigenvalues([-1, 2]) == "Saddle"
    assert classify_eigenvalues([0.0, -1]) == "NonHyperbolic"
