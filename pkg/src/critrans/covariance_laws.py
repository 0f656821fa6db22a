"""Covariance of the linearized fluctuation process near attracting slow manifolds.

Contents:

* ``solve_lyapunov``: dense solve of A X + X A^T + N = 0 over the
  m(m+1)/2 independent entries of the symmetric unknown.
* ``covariance_closed_form``: closed-form leading-order covariances for the
  catalog entries, with per-entry scaling exponents for the three- and
  four-dimensional cases.
* Doubly singular fold expansions h_eps(y) and H_eps(y) for
  ``eps dx = (y - x^2) ds + ...`` with ``dy = -ds``.
* Numerical checks: a matrix-ODE integrator, a Laplace-integral ratio and a
  Monte-Carlo moment bound.

Fold series orientation
-----------------------
The coefficient magnitudes of the ε-series are the published ones. Their
signs are chosen by ``resolve_fold_orientation``, which evaluates the
invariance residual of the slow manifold along the approach direction
(dy/ds = -1) for every candidate sign pattern and keeps the one whose
residual decays like ε^(order+1). The outcome is ``"alternating"``: the
ε^k term carries an extra factor (-1)^k relative to the printed signs, so
h_eps = sqrt(y) + ε/(4y) - ... and H_eps = 1/(4 sqrt(y)) - 3ε/(32 y^2) + ....
The printed signs are exact for the receding direction dy/ds = +1 and remain
available through ``orientation="printed"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .normal_forms import Kind, NormalFormEntry, linearization_A0
from .series import CovarianceSeries

__all__ = [
    "LyapunovError",
    "SeriesDisorderError",
    "StepTooLargeError",
    "CovarianceMatrix",
    "MomentCheck",
    "solve_lyapunov",
    "spectral_abscissa",
    "covariance_closed_form",
    "fold_slow_manifold_expansion",
    "fold_variance_expansion",
    "fold_series_terms",
    "fold_invariance_residual",
    "resolve_fold_orientation",
    "integrate_variance_ode",
    "laplace_ratio",
    "moment_bound_check",
]

HURWITZ_TOL = -1e-12


class LyapunovError(ValueError):
    """The Lyapunov system is singular (A not Hurwitz) or ill-posed."""


class SeriesDisorderError(ValueError):
    """Terms of an asymptotic series stopped decreasing at the requested order."""


class StepTooLargeError(ValueError):
    pass


@dataclass
class CovarianceMatrix:
    X: np.ndarray
    y: np.ndarray
    order: int = 0
    # (i, j) -> (slow coordinate index, predicted exponent); only for 3-D/4-D entries
    exponents: dict = field(default_factory=dict)


def spectral_abscissa(A) -> float:
    return float(np.max(np.linalg.eigvals(np.atleast_2d(A)).real))


def _sym_index(m: int):
    pairs = [(i, j) for i in range(m) for j in range(i, m)]
    lookup = {}
    for p, (i, j) in enumerate(pairs):
        lookup[(i, j)] = p
        lookup[(j, i)] = p
    return pairs, lookup


def solve_lyapunov(A, N, check_stable: bool = True) -> np.ndarray:
    """Unique symmetric X with A X + X A^T + N = 0."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    N = np.atleast_2d(np.asarray(N, dtype=float))
    m = A.shape[0]
    if A.shape != (m, m) or N.shape != (m, m):
        raise ValueError("A and N must be square with equal size")
    if not np.allclose(N, N.T, rtol=1e-12, atol=0.0):
        raise ValueError("N must be symmetric")
    if check_stable and spectral_abscissa(A) >= HURWITZ_TOL:
        raise LyapunovError("A is not Hurwitz; the stationary covariance does not exist")
    pairs, lookup = _sym_index(m)
    p = len(pairs)
    M = np.zeros((p, p))
    rhs = np.empty(p)
    for row, (i, j) in enumerate(pairs):
        # (A X)_ij + (X A^T)_ij = sum_k A_ik X_kj + A_jk X_ik
        for k in range(m):
            M[row, lookup[(k, j)]] += A[i, k]
            M[row, lookup[(i, k)]] += A[j, k]
        rhs[row] = -N[i, j]
    try:
        v = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise LyapunovError("singular Lyapunov system") from exc
    X = np.empty((m, m))
    for (i, j), val in zip(pairs, v):
        X[i, j] = X[j, i] = val
    return X


def _noise_at(N, y) -> np.ndarray:
    val = N(y) if callable(N) else N
    return np.atleast_2d(np.asarray(val, dtype=float))


def _v4(yv: float, N: np.ndarray) -> np.ndarray:
    n11, n12, n22 = N[0, 0], N[0, 1], N[1, 1]
    den = 4.0 * (yv * yv + 1.0)
    v11 = -(2 * n11 * yv * yv + 2 * n12 * yv + n11 + n22) / (den * yv)
    v22 = -(2 * n22 * yv * yv - 2 * n12 * yv + n11 + n22) / (den * yv)
    v12 = (n11 - n22 - 2 * n12 * yv) / den
    return np.array([[v11, v12], [v12, v22]])


def _v5(y1: float, N: np.ndarray, k: float, pm: int) -> np.ndarray:
    # closed form for A = [[0, 1], [pm*2w, k w]], w = sqrt(-y1)
    n11, n12, n22 = N[0, 0], N[0, 1], N[1, 1]
    w = math.sqrt(-y1)
    v11 = (-n22 + 2 * k * n12 * w + pm * 2 * n11 * w + n11 * k * k * y1) / (pm * 4 * k * y1)
    v12 = -n11 / 2.0
    v22 = (pm * 2 * n11 + n22 * y1 / (-y1) ** 1.5) / (2 * k)
    return np.array([[v11, v12], [v12, v22]])


def bt_branch_matrix(y1: float, k: float, branch: int) -> np.ndarray:
    """Leading-order BT linearization on branch x1 = branch*sqrt(-y1); trace slot -k*sqrt(-y1)."""
    w = math.sqrt(-y1)
    return np.array([[0.0, 1.0], [2.0 * branch * w, -k * w]])


def covariance_closed_form(e: NormalFormEntry, y, N, branch: int = -1) -> CovarianceMatrix:
    """Leading-order covariance H0(y) of the linearized process.

    ``N`` is a constant matrix or a callable y -> matrix. ``branch`` selects the
    Bogdanov-Takens critical-manifold branch x1 = branch*sqrt(-y1); the
    attracting one is -1.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    Nm = _noise_at(N, y)
    if Nm.shape != (e.m, e.m):
        raise ValueError(f"N must be {e.m}x{e.m}")
    k = e.kind
    if k in (Kind.FOLD, Kind.TRANSCRITICAL, Kind.PITCHFORK, Kind.CUSP):
        a0 = linearization_A0(e, y)[0, 0]
        return CovarianceMatrix(np.array([[-Nm[0, 0] / (2.0 * a0)]]), y)
    if k in (Kind.HOPF, Kind.BAUTIN):
        linearization_A0(e, y)  # precondition check
        return CovarianceMatrix(_v4(float(y[0]), Nm), y)
    if k is Kind.BOGDANOV_TAKENS:
        if branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if branch == -1:
            linearization_A0(e, y)
        elif not y[0] < 0:
            raise ValueError("bogdanov-takens branches need y1 < 0")
        # the realized trace slot is -k*sqrt(-y1), i.e. the formula's k is -aux.k
        return CovarianceMatrix(_v5(float(y[0]), Nm, -e.aux.k, branch), y)
    if k is Kind.FOLD_HOPF:
        A = linearization_A0(e, y)
        X = solve_lyapunov(A, Nm)
        ex = {(0, 0): (0, -0.5), (1, 1): (1, -1.0), (2, 2): (1, -1.0)}
        for ij in [(0, 1), (0, 2), (1, 2)]:
            ex[ij] = (None, 0.0)
        return CovarianceMatrix(X, y, exponents=ex)
    if k is Kind.HOPF_HOPF:
        A = linearization_A0(e, y)
        X = solve_lyapunov(A, Nm)
        ex = {(0, 0): (0, -1.0), (1, 1): (0, -1.0), (2, 2): (1, -1.0), (3, 3): (1, -1.0)}
        for i in range(4):
            for j in range(i + 1, 4):
                ex[(i, j)] = (None, 0.0)
        return CovarianceMatrix(X, y, exponents=ex)
    raise ValueError(f"unknown kind {k}")


# ---------------------------------------------------------------------------
# fold expansions

# printed coefficients and powers of y for h_eps and H_eps
_H_MANIFOLD = ((1.0, 0.5), (-1 / 4, -1.0), (-5 / 32, -2.5), (-15 / 64, -4.0), (-1105 / 2048, -5.5))
_H_VARIANCE = ((1 / 4, -0.5), (3 / 32, -2.0), (7 / 64, -3.5), (201 / 1024, -5.0), (3837 / 8192, -6.5))

_PATTERNS = ("printed", "alternating")


def _pattern_sign(pattern: str, k: int) -> float:
    if pattern == "printed":
        return 1.0
    if pattern == "alternating":
        return -1.0 if k % 2 else 1.0
    raise ValueError(f"unknown sign pattern {pattern!r}")


def _pattern(orientation: str) -> str:
    if orientation == "resolved":
        return resolve_fold_orientation()
    if orientation in _PATTERNS:
        return orientation
    raise ValueError("orientation must be 'resolved', 'printed' or 'alternating'")


def fold_series_terms(which: str, y: float, eps: float, order: int,
                      orientation: str = "resolved", derivative: bool = False) -> np.ndarray:
    """Individual terms eps^k c_k y^p_k (or their y-derivatives) for k = 0..order."""
    table = {"manifold": _H_MANIFOLD, "variance": _H_VARIANCE}[which]
    if not 0 <= order <= 4:
        raise ValueError("order must be in 0..4")
    if not y > 0:
        raise ValueError("y must be positive")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    pat = _pattern(orientation)
    out = np.empty(order + 1)
    for k in range(order + 1):
        c, p = table[k]
        c = c * _pattern_sign(pat, k) * eps ** k
        out[k] = c * p * y ** (p - 1.0) if derivative else c * y ** p
    return out


def _checked_sum(terms: np.ndarray, label: str, y: float, eps: float) -> float:
    mags = np.abs(terms)
    for k in range(1, len(terms)):
        if mags[k] != 0.0 and mags[k] >= mags[k - 1]:
            raise SeriesDisorderError(
                f"{label} series disordered at order {k} for y={y}, eps={eps}")
    # sum from the smallest term up
    return float(np.sum(terms[::-1]))


def fold_slow_manifold_expansion(y: float, eps: float, order: int = 4,
                                 orientation: str = "resolved") -> float:
    """Partial sum of the slow-manifold series h_eps(y) through eps^order."""
    return _checked_sum(fold_series_terms("manifold", y, eps, order, orientation),
                        "slow-manifold", y, eps)


def fold_variance_expansion(y: float, eps: float, order: int = 4,
                            orientation: str = "resolved") -> float:
    """Partial sum of the scaled-variance series H_eps(y) through eps^order."""
    return _checked_sum(fold_series_terms("variance", y, eps, order, orientation),
                        "variance", y, eps)


def fold_invariance_residual(which: str, y: float, eps: float, order: int,
                             pattern: str, ydot: float = -1.0) -> float:
    """Residual of the invariance equation for a truncated series.

    manifold: eps*ydot*h' - (y - h^2);  variance: eps*ydot*H' - (1 - 4 h H),
    with h and H truncated at the same order.
    """
    h = np.sum(fold_series_terms("manifold", y, eps, order, pattern))
    if which == "manifold":
        dh = np.sum(fold_series_terms("manifold", y, eps, order, pattern, derivative=True))
        return float(eps * ydot * dh - (y - h * h))
    H = np.sum(fold_series_terms("variance", y, eps, order, pattern))
    dH = np.sum(fold_series_terms("variance", y, eps, order, pattern, derivative=True))
    return float(eps * ydot * dH - (1.0 - 4.0 * h * H))


def _residual_slope(which, pattern, order, y=0.5, eps_pair=(1e-2, 1e-3)) -> float:
    r = [abs(fold_invariance_residual(which, y, e, order, pattern)) for e in eps_pair]
    return math.log(r[0] / r[1]) / math.log(eps_pair[0] / eps_pair[1])


@lru_cache(maxsize=None)
def resolve_fold_orientation() -> str:
    """Sign pattern whose residual decays like eps^(order+1) along dy/ds = -1."""
    best, best_err = None, math.inf
    for pat in _PATTERNS:
        err = 0.0
        for which in ("manifold", "variance"):
            for order in (1, 2, 3):
                err = max(err, abs(_residual_slope(which, pat, order) - (order + 1)))
        if err < best_err:
            best, best_err = pat, err
    if best_err > 0.3:
        raise RuntimeError("no sign pattern satisfies the invariance residual test")
    return best


# ---------------------------------------------------------------------------
# linearized variance ODE

def integrate_variance_ode(A_path: Callable, N_path: Callable, g_slow: Callable, eps: float,
                           y0, y_end: float, step: float, n_records: int = 401,
                           coord: int = 0) -> CovarianceSeries:
    """Fixed-step RK4 for eps X' = A X + X A^T + N with y' = g(y).

    Starts on the Lyapunov solution at y0 and stops when y[coord] reaches
    y_end. The step must satisfy step <= eps / (10 * spectral radius of A);
    A must stay Hurwitz, both checked on the record grid.
    """
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    A = np.atleast_2d(A_path(y))
    N = np.atleast_2d(N_path(y))
    X = solve_lyapunov(A, N)

    gy = np.atleast_1d(g_slow(y))
    speed = abs(gy[coord])
    if speed == 0:
        raise ValueError("slow drift vanishes in the tracked coordinate")
    direction = math.copysign(1.0, y_end - y[coord])
    if math.copysign(1.0, gy[coord]) != direction:
        raise ValueError("slow drift points away from y_end")
    total = abs(y_end - y[coord]) / speed
    n_steps = max(1, int(math.ceil(total / step - 1e-9)))
    h = total / n_steps
    rec_every = max(1, n_steps // max(1, n_records - 1))

    def guard(A_, yy):
        ev = np.linalg.eigvals(A_)
        if ev.real.max() >= HURWITZ_TOL:
            raise LyapunovError(f"A lost the Hurwitz property at y={yy}")
        rho = np.abs(ev).max()
        if h > eps / (10.0 * rho) * (1 + 1e-9):
            raise StepTooLargeError(
                f"step {h:g} exceeds eps/(10*rho) = {eps / (10 * rho):g} at y={yy}")

    guard(A, y.copy())

    def rhs(Xc, yc):
        Ac = np.atleast_2d(A_path(yc))
        return (Ac @ Xc + Xc @ Ac.T + np.atleast_2d(N_path(yc))) / eps, np.atleast_1d(g_slow(yc))

    ys, Xs, ss = [y.copy()], [X.copy()], [0.0]
    s = 0.0
    for i in range(1, n_steps + 1):
        k1x, k1y = rhs(X, y)
        k2x, k2y = rhs(X + 0.5 * h * k1x, y + 0.5 * h * k1y)
        k3x, k3y = rhs(X + 0.5 * h * k2x, y + 0.5 * h * k2y)
        k4x, k4y = rhs(X + h * k3x, y + h * k3y)
        X = X + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        X = 0.5 * (X + X.T)
        y = y + (h / 6.0) * (k1y + 2 * k2y + 2 * k3y + k4y)
        s += h
        if i % rec_every == 0 or i == n_steps:
            guard(np.atleast_2d(A_path(y)), y.copy())
            ys.append(y.copy())
            Xs.append(X.copy())
            ss.append(s)
    yarr = np.array(ys)
    if yarr.shape[1] == 1:
        yarr = yarr[:, 0]
    return CovarianceSeries(yarr, np.array(Xs), "LinearizedODE", s=np.array(ss),
                            meta={"eps": eps, "step": h})


# ---------------------------------------------------------------------------
# asymptotic checks

def laplace_ratio(y0: float, s: float, eps: float, kappa: float):
    """Quadrature of int_0^s exp(phi(r)/eps) dr against eps/(kappa sqrt(-s-y0)).

    phi(r) = (2 kappa / 3) [(-s-y0)^(3/2) - (-r-y0)^(3/2)].
    """
    if not (s >= 0 and -s - y0 > 0 and eps > 0 and kappa > 0):
        raise ValueError("need s >= 0, -s - y0 > 0, eps > 0, kappa > 0")
    gap = -s - y0
    asymptotic = eps / (kappa * math.sqrt(gap))
    if s == 0:
        return 0.0, asymptotic
    c = 2.0 * kappa / 3.0

    def integrand(r):
        return math.exp(c * (gap ** 1.5 - (-r - y0) ** 1.5) / eps)

    # the integrand lives in a boundary layer of width ~asymptotic at r = s
    cut = s - 60.0 * asymptotic
    if cut > 0:
        left, _ = integrate.quad(integrand, 0.0, cut, epsabs=0.0, epsrel=1e-10, limit=400)
        right, _ = integrate.quad(integrand, cut, s, epsabs=0.0, epsrel=1e-10, limit=400)
        numeric = left + right
    else:
        numeric, _ = integrate.quad(integrand, 0.0, s, epsabs=0.0, epsrel=1e-10, limit=400)
    return numeric, asymptotic


@dataclass
class MomentCheck:
    empirical: float
    bound: float
    stderr: float

    @property
    def within_bound(self) -> bool:
        return self.empirical <= self.bound + 3.0 * self.stderr


def moment_bound_check(theta: float, M: float, p: int, n_paths: int = 20000,
                       horizon: float = 8.0, seed: int = 0, dt: float = 0.005) -> MomentCheck:
    """Monte-Carlo E[X^(2p)] for dX = -theta X dt + M dW, X0 = 0, against p! (M^2/theta)^p."""
    from .sde_engine import FastSlowSystem, SimConfig, simulate_ensemble

    if theta <= 0 or M < 0 or p not in (1, 2, 3):
        raise ValueError("need theta > 0, M >= 0, p in {1, 2, 3}")
    bound = math.factorial(p) * (M * M / theta) ** p
    n_steps = int(round(horizon / dt))
    system = FastSlowSystem(
        m=1, n=1, k=1, eps=1.0, sigma=M,
        f=lambda x, y: -theta * x,
        g=lambda x, y: np.zeros_like(y),
        F=lambda x, y: np.ones((x.shape[0], 1, 1)),
    )
    cfg = SimConfig(dt=dt, s_end=n_steps * dt, record_stride=n_steps, master_seed=seed,
                    n_paths=n_paths, allow_coarse=True)
    ens = simulate_ensemble(system, cfg, [0.0], [0.0])
    xT = ens.x[:, -1, 0]
    vals = xT ** (2 * p)
    return MomentCheck(float(vals.mean()), bound, float(vals.std(ddof=1) / math.sqrt(len(vals))))
