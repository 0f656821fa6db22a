"""Least-squares scaling-law fits that predict the transition point y_c."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import numpy as np
from scipy import stats

__all__ = [
    "Law",
    "ScalingFit",
    "LinearFit",
    "TrendResult",
    "fit_scaling",
    "compare_laws",
    "linear_fit",
    "trend_test",
    "law_model",
    "BreakpointFit",
    "piecewise_linear_break",
]

MAX_ITER = 200
GRAD_TOL = 1e-12


class Law(str, Enum):
    INV_SQRT = "inv-sqrt"          # A / sqrt(y - y_c), data above y_c
    INV = "inv"                    # A / (y - y_c)
    INV_SQRT_REV = "inv-sqrt-rev"  # A / sqrt(y_c - y), data below y_c
    INV_REV = "inv-rev"            # A / (y_c - y)
    LINEAR = "linear"              # A * y + b, y_c = root


_POWER = {Law.INV_SQRT: 0.5, Law.INV: 1.0, Law.INV_SQRT_REV: 0.5, Law.INV_REV: 1.0}
_SIDE = {Law.INV_SQRT: 1.0, Law.INV: 1.0, Law.INV_SQRT_REV: -1.0, Law.INV_REV: -1.0}


@dataclass
class ScalingFit:
    law: Law
    A: float
    y_c: float
    rss: float
    converged: bool
    iterations: int
    params: dict = field(default_factory=dict)

    def predict(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.law is Law.LINEAR:
            return self.params["slope"] * y + self.params["intercept"]
        return law_model(self.law, y, self.A, self.y_c)

    def as_dict(self) -> dict:
        return {"law": self.law.value, "A": self.A, "y_c": self.y_c, "rss": self.rss,
                "converged": self.converged, "iterations": self.iterations}


def law_model(law: Law, y, A: float, y_c: float) -> np.ndarray:
    law = Law(law)
    d = _SIDE[law] * (np.asarray(y, dtype=float) - y_c)
    return A * d ** (-_POWER[law])


def _lm(law: Law, y: np.ndarray, V: np.ndarray, A0: float, yc0: float):
    """Levenberg-Marquardt over (A, y_c) on data scaled to unit magnitude."""
    side, p = _SIDE[law], _POWER[law]

    def resid_jac(A, yc):
        d = side * (y - yc)
        if np.any(d <= 0):
            return None, None
        dp = d ** (-p)
        r = A * dp - V
        J = np.empty((len(y), 2))
        J[:, 0] = dp
        J[:, 1] = A * p * side * d ** (-p - 1.0)  # d/dyc of A d^-p, with dd/dyc = -side
        return r, J

    theta = np.array([A0, yc0], dtype=float)
    r, J = resid_jac(*theta)
    rss = float(r @ r)
    lam = 1e-3
    converged = False
    it = 0
    for it in range(1, MAX_ITER + 1):
        grad = J.T @ r
        if np.max(np.abs(grad)) < GRAD_TOL:
            converged = True
            it -= 1
            break
        JTJ = J.T @ J
        accepted = False
        while lam < 1e16:
            Mtx = JTJ + lam * np.diag(np.diag(JTJ))
            try:
                delta = np.linalg.solve(Mtx, -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = theta + delta
            r2, J2 = resid_jac(*trial)
            if r2 is not None:
                rss2 = float(r2 @ r2)
                if rss2 <= rss:
                    accepted = True
                    break
            lam *= 10.0
        if not accepted:
            # no downhill step at any damping: stationary to working precision
            converged = True
            break
        small = np.all(np.abs(delta) <= 1e-15 * (np.abs(theta) + 1e-15))
        theta, r, J = trial, r2, J2
        drop = rss - rss2
        rss = rss2
        lam = max(lam / 10.0, 1e-12)
        if small or rss == 0.0 or drop <= 1e-30 * max(rss, 1e-300):
            converged = True
            break
    return theta, rss, converged, it


def _validate(y, V, law: Law):
    y = np.asarray(y, dtype=float).ravel()
    V = np.asarray(V, dtype=float).ravel()
    if y.shape != V.shape:
        raise ValueError("y and V must have equal length")
    if len(y) < 5:
        raise ValueError("need at least 5 points")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(V))):
        raise ValueError("y and V must be finite")
    if law is not Law.LINEAR and np.any(V <= 0):
        raise ValueError("reciprocal laws need V > 0")
    return y, V


def linear_fit(y, V):
    """Ordinary least squares V = slope*y + intercept with R^2."""
    y = np.asarray(y, float)
    V = np.asarray(V, float)
    res = stats.linregress(y, V)
    return LinearFit(float(res.slope), float(res.intercept), float(res.rvalue ** 2))


@dataclass
class LinearFit:
    slope: float
    intercept: float
    r2: float

    @property
    def root(self) -> float:
        return -self.intercept / self.slope if self.slope != 0 else math.inf


def fit_scaling(y, V, law) -> ScalingFit:
    """Fit one scaling law by least squares and return the predicted y_c."""
    law = Law(law)
    y, V = _validate(y, V, law)
    if law is Law.LINEAR:
        X = np.column_stack([y, np.ones_like(y)])
        coef, *_ = np.linalg.lstsq(X, V, rcond=None)
        slope, intercept = float(coef[0]), float(coef[1])
        r = X @ coef - V
        yc = -intercept / slope if slope != 0 else math.inf
        return ScalingFit(law, slope, yc, float(r @ r), True, 0,
                          {"slope": slope, "intercept": intercept})
    side, p = _SIDE[law], _POWER[law]
    span = float(y.max() - y.min())
    if span <= 0:
        raise ValueError("y values must not all coincide")
    # seed y_c beyond the data edge on the approach side
    edge = y.max() if side < 0 else y.min()
    yc0 = edge - side * 0.1 * span
    i = int(np.argmin(np.abs(y - yc0)))
    A0_raw = V[i] * (side * (y[i] - yc0)) ** p
    scale = float(np.max(np.abs(V)))
    theta, rss, conv, it = _lm(law, y, V / scale, A0_raw / scale, yc0)
    return ScalingFit(law, float(theta[0] * scale), float(theta[1]), float(rss * scale * scale),
                      conv, it)


def compare_laws(y, V, laws: Optional[Iterable] = None) -> list:
    """Fit each law and rank by residual sum of squares (fewer iterations break ties)."""
    laws = list(Law) if laws is None else [Law(l) for l in laws]
    fits = []
    for law in laws:
        try:
            fits.append(fit_scaling(y, V, law))
        except ValueError:
            continue
    return sorted(fits, key=lambda f: (f.rss, f.iterations))


@dataclass
class TrendResult:
    tau: float
    pvalue: float
    label: str


def trend_test(y, V, threshold: float = 0.3) -> TrendResult:
    """Kendall tau of V against y: increasing, decreasing or trend-free."""
    y = np.asarray(y, float)
    V = np.asarray(V, float)
    ok = np.isfinite(y) & np.isfinite(V)
    res = stats.kendalltau(y[ok], V[ok])
    tau = float(res.statistic)
    label = "increasing" if tau > threshold else "decreasing" if tau < -threshold else "trend-free"
    return TrendResult(tau, float(res.pvalue), label)


@dataclass
class BreakpointFit:
    y_break: float
    index: int
    left: LinearFit
    right: LinearFit
    sse: float


def piecewise_linear_break(y, z, min_points: int = 5, max_candidates: int = 400) -> BreakpointFit:
    """Two independent straight lines split at the breakpoint minimizing total SSE.

    Used on reciprocal variances, whose linear pre-transition part ends where
    the paths leave the attracting branch.
    """
    y = np.asarray(y, float).ravel()
    z = np.asarray(z, float).ravel()
    ok = np.isfinite(y) & np.isfinite(z)
    y, z = y[ok], z[ok]
    if len(y) < 2 * min_points:
        raise ValueError(f"need at least {2 * min_points} finite points")
    order = np.argsort(y, kind="stable")
    y, z = y[order], z[order]

    def sse(yy, zz, f):
        r = zz - f.slope * yy - f.intercept
        return float(r @ r)

    best = None
    step = max(1, (len(y) - 2 * min_points) // max_candidates)
    for k in range(min_points, len(y) - min_points + 1, step):
        a = linear_fit(y[:k], z[:k])
        b = linear_fit(y[k:], z[k:])
        total = sse(y[:k], z[:k], a) + sse(y[k:], z[k:], b)
        if best is None or total < best.sse:
            best = BreakpointFit(float(y[k]), k, a, b, total)
    return best
