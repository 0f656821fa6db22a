"""Shared preset container and the equilibrium-branch sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from ..sde_engine import FastSlowSystem

__all__ = ["ModelPreset", "EquilibriumBranch", "Event", "numeric_jacobian", "equilibrium_branch_sweep",
           "classify_eigenvalues"]


@dataclass
class ModelPreset:
    id: str
    params: dict
    system: FastSlowSystem
    analytics: Any
    x0: np.ndarray
    y0: np.ndarray
    # simulation defaults: dt, s_end and anything the experiments need
    defaults: dict = field(default_factory=dict)
    # y (n-vector) -> attracting fast state; used for critical-manifold detrending
    branch: Optional[Callable] = None

    def branch_at(self, y) -> np.ndarray:
        if self.branch is None:
            raise ValueError(f"{self.id} has no attracting-branch map")
        return np.asarray(self.branch(np.atleast_1d(np.asarray(y, float))), float)


@dataclass
class Event:
    t: float
    y: np.ndarray
    kind: str          # "hopf", "zero-eigenvalue" or "termination"
    imag: float = 0.0


@dataclass
class EquilibriumBranch:
    t: np.ndarray
    y_grid: np.ndarray
    x_values: np.ndarray
    stability: list
    max_real: np.ndarray
    detected_events: list


def numeric_jacobian(f1: Callable, x, y, rel: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, float)
    m = x.size
    J = np.empty((m, m))
    for j in range(m):
        h = rel * max(1.0, abs(x[j]))
        e = np.zeros(m)
        e[j] = h
        J[:, j] = (f1(x + e, y) - f1(x - e, y)) / (2.0 * h)
    return J


def classify_eigenvalues(ev, tol: float = 1e-9) -> str:
    re = np.real(ev)
    if np.any(np.abs(re) <= tol):
        return "NonHyperbolic"
    if np.all(re < 0):
        return "Attracting"
    if np.all(re > 0):
        return "Repelling"
    return "Saddle"


def _newton(f1, jac, x, y, tol=1e-12, max_iter=60):
    x = np.array(x, dtype=float)
    for _ in range(max_iter):
        r = f1(x, y)
        if not np.all(np.isfinite(r)):
            return None
        try:
            dx = np.linalg.solve(jac(x, y), -r)
        except np.linalg.LinAlgError:
            return None
        x = x + dx
        if not np.all(np.isfinite(x)):
            return None
        if np.max(np.abs(dx)) <= tol * max(1.0, np.max(np.abs(x))):
            return x
    r = f1(x, y)
    return x if np.max(np.abs(r)) <= 1e-10 else None


def equilibrium_branch_sweep(system: FastSlowSystem, y_path: Callable, n_points: int, x_seed,
                             jac: Optional[Callable] = None, jump_tol: float = 0.1,
                             refine_tol: float = 1e-12) -> EquilibriumBranch:
    """Follow a fast-subsystem equilibrium along y_path(t), t in [0, 1].

    Newton continuation reuses the previous point as the initial guess. Sign
    changes of the largest eigenvalue real part are located by bisection and
    labeled "hopf" when the crossing eigenvalue has |imag| > 1e-6. A failed
    Newton solve or a jump larger than ``jump_tol`` ends the branch with a
    "termination" event located by bisection.
    """
    def f1(x, y):
        return system.drift(x, y)

    J = jac if jac is not None else (lambda x, y: numeric_jacobian(f1, x, y))

    def solve(t, guess):
        y = np.atleast_1d(np.asarray(y_path(t), float))
        x = _newton(f1, J, guess, y)
        return y, x

    def spectrum(x, y):
        ev = np.linalg.eigvals(J(x, y))
        i = int(np.argmax(ev.real))
        return ev, float(ev.real[i]), float(abs(ev.imag[i]))

    ts = np.linspace(0.0, 1.0, n_points)
    y, x = solve(0.0, x_seed)
    if x is None:
        raise ValueError("Newton failed at the seed point")
    T, Y, X, stab, mr = [], [], [], [], []
    events = []

    def push(t, y, x):
        ev, a, _ = spectrum(x, y)
        T.append(t)
        Y.append(y)
        X.append(x)
        stab.append(classify_eigenvalues(ev))
        mr.append(a)

    push(0.0, y, x)
    for t in ts[1:]:
        y_new, x_new = solve(t, X[-1])
        jumped = x_new is not None and np.max(np.abs(x_new - X[-1])) > jump_tol * max(1.0, np.max(np.abs(X[-1])))
        if x_new is None or jumped:
            # bisect for the last parameter value where continuation still holds
            lo, hi, xlo = T[-1], t, X[-1]
            while hi - lo > refine_tol:
                mid = 0.5 * (lo + hi)
                _, xm = solve(mid, xlo)
                if xm is not None and np.max(np.abs(xm - xlo)) <= jump_tol * max(1.0, np.max(np.abs(xlo))):
                    lo, xlo = mid, xm
                else:
                    hi = mid
            events.append(Event(lo, np.atleast_1d(np.asarray(y_path(lo), float)), "termination"))
            break
        prev_a = mr[-1]
        push(t, y_new, x_new)
        a = mr[-1]
        if prev_a == 0 or a == 0 or (prev_a < 0) != (a < 0):
            lo, hi = T[-2], T[-1]
            xlo = X[-2]
            a_lo = prev_a
            while hi - lo > refine_tol:
                mid = 0.5 * (lo + hi)
                ym, xm = solve(mid, xlo)
                if xm is None:
                    break
                _, am, _ = spectrum(xm, ym)
                if (am < 0) == (a_lo < 0):
                    lo, xlo, a_lo = mid, xm, am
                else:
                    hi = mid
            ym, xm = solve(lo, xlo)
            _, _, im = spectrum(xm, ym)
            events.append(Event(lo, ym, "hopf" if im > 1e-6 else "zero-eigenvalue", im))
    yg = np.array(Y)
    return EquilibriumBranch(np.array(T), yg[:, 0] if yg.shape[1] == 1 else yg, np.array(X), stab,
                             np.array(mr), events)
