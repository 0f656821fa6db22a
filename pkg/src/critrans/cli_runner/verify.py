"""Property suites behind `critrans verify`."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..covariance_laws import (covariance_closed_form, fold_invariance_residual, fold_slow_manifold_expansion,
                               fold_variance_expansion, integrate_variance_ode, laplace_ratio,
                               moment_bound_check, resolve_fold_orientation, solve_lyapunov)
from ..normal_forms import Kind, attracting_sample, entry, linearization_A0

__all__ = ["CaseResult", "SUITES", "run_suite", "LYAPUNOV_KINDS"]

LYAPUNOV_KINDS = (Kind.FOLD, Kind.TRANSCRITICAL, Kind.PITCHFORK, Kind.CUSP, Kind.HOPF, Kind.BAUTIN,
                  Kind.BOGDANOV_TAKENS)


@dataclass
class CaseResult:
    case: str
    value: float
    threshold: float
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def random_psd(m: int, rng: np.random.Generator) -> np.ndarray:
    B = rng.standard_normal((m, m))
    return B @ B.T + 1e-3 * np.eye(m)


def lyapunov_suite(n_y: int = 20, n_noise: int = 10, seed: int = 7, tol: float = 1e-10) -> list:
    """Closed-form covariances against the direct Lyapunov solve."""
    rng = np.random.default_rng(seed)
    out = []
    for kind in LYAPUNOV_KINDS:
        e = entry(kind)
        worst = 0.0
        for t in np.logspace(-4, 0, n_y):
            y = attracting_sample(e, float(t))
            A = linearization_A0(e, y)
            for _ in range(n_noise):
                N = random_psd(e.m, rng)
                X = covariance_closed_form(e, y, N).X
                ref = solve_lyapunov(A, N)
                worst = max(worst, float(np.linalg.norm(X - ref) / np.linalg.norm(ref)))
        out.append(CaseResult(f"closed-form/{kind.value}", worst, tol, worst <= tol,
                              f"{n_y} y values x {n_noise} noise matrices"))
    return out


def fold_ode_errors(eps: float, order: int = 4, y_range=(0.5, 1.5), y_start: float = 1.8):
    """Max relative gap between the integrated fold variance and its series, for orders 0..order."""
    def A(y):
        return np.array([[-2.0 * fold_slow_manifold_expansion(y[0], eps, 4)]])

    ser = integrate_variance_ode(A, lambda y: np.array([[1.0]]), lambda y: np.array([-1.0]), eps,
                                 [y_start], y_range[0], eps / 30.0)
    y = ser.y
    X = ser.cov[:, 0, 0]
    keep = (y >= y_range[0]) & (y <= y_range[1])
    errs = []
    for k in range(order + 1):
        H = np.array([fold_variance_expansion(v, eps, k) for v in y[keep]])
        errs.append(float(np.max(np.abs(X[keep] - H) / np.abs(H))))
    return errs


def fold_expansion_suite(eps_pair=(1e-2, 1e-3), tol: float = 1e-3) -> list:
    out = []
    errs = {}
    for eps in eps_pair:
        errs[eps] = fold_ode_errors(eps)
        out.append(CaseResult(f"ode-vs-series/eps={eps:g}", errs[eps][4], tol, errs[eps][4] <= tol,
                              "order 4 on y in [0.5, 1.5]"))
    pat = resolve_fold_orientation()
    lr = math.log(eps_pair[0] / eps_pair[1])
    for which in ("manifold", "variance"):
        for order in range(5):
            r = [abs(fold_invariance_residual(which, 0.5, e, order, pat)) for e in eps_pair]
            slope = math.log(r[0] / r[1]) / lr
            dev = abs(slope - (order + 1))
            out.append(CaseResult(f"residual-slope/{which}/order={order}", slope, 0.3, dev <= 0.3,
                                  f"expected {order + 1}, orientation {pat}"))
    return out


def laplace_suite(cases=((-1.0, 0.5, 1.0), (-2.0, 1.0, 1.0), (-0.5, 0.25, 2.0))) -> list:
    out = []
    for y0, s, kappa in cases:
        gaps = []
        for eps in (1e-3, 1e-4):
            num, asym = laplace_ratio(y0, s, eps, kappa)
            gaps.append(abs(num / asym - 1.0))
        tag = f"y0={y0:g},s={s:g},kappa={kappa:g}"
        out.append(CaseResult(f"laplace/{tag}/eps=1e-3", gaps[0], 0.05, gaps[0] <= 0.05, "|ratio - 1|"))
        out.append(CaseResult(f"laplace/{tag}/eps=1e-4", gaps[1], gaps[0], gaps[1] < gaps[0],
                              "strictly closer than at eps=1e-3"))
    return out


def moments_suite(theta: float = 1.0, M: float = 1.0, seed: int = 20240611, n_paths: int = 20000) -> list:
    out = []
    for p in (1, 2, 3):
        chk = moment_bound_check(theta, M, p, n_paths=n_paths, seed=seed)
        out.append(CaseResult(f"moment/p={p}", chk.empirical, chk.bound + 3 * chk.stderr, chk.within_bound,
                              f"bound p!(M^2/theta)^p = {chk.bound:g}, stderr {chk.stderr:.3g}"))
    return out


SUITES = {
    "lyapunov": lyapunov_suite,
    "fold-expansion": fold_expansion_suite,
    "laplace": laplace_suite,
    "moments": moments_suite,
}


def run_suite(name: str) -> list:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
