"""Activator-inhibitor oscillator and the companion Hopf normal form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..sde_engine import FastSlowSystem
from .base import ModelPreset

__all__ = [
    "goldbeter_koshland",
    "goldbeter_koshland_du",
    "ActivatorInhibitorAnalytics",
    "activator_inhibitor",
    "HopfNormalFormAnalytics",
    "hopf_normal_form",
    "correlated_noise_factor",
]

RADICAND_TOL = -1e-12


def _gk_parts(u, v, J, K):
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    B = v - u + v * J + u * K
    D = B * B - 4.0 * (v - u) * u * K
    if np.any(D < RADICAND_TOL):
        raise ValueError("Goldbeter-Koshland radicand is negative")
    return u, v, B, np.sqrt(np.maximum(D, 0.0))


def goldbeter_koshland(u, v, J, K):
    """G(u, v, J, K) without cancellation.

    For B = v-u+vJ+uK >= 0 the usual form 2uK / (B + sqrt(D)) is a sum of
    nonnegative terms. For B < 0 (which forces v < u) the conjugate form
    (B - sqrt(D)) / (2(v-u)) is used instead.
    """
    if J <= 0 or K <= 0:
        raise ValueError("J and K must be positive")
    u, v, B, sD = _gk_parts(u, v, J, K)
    if np.any(u < 0) or np.any(v < 0):
        raise ValueError("u and v must be nonnegative")
    with np.errstate(divide="ignore", invalid="ignore"):
        plain = 2.0 * u * K / (B + sD)
        conj = (B - sD) / (2.0 * (v - u))
    out = np.where(B >= 0, plain, conj)
    out = np.where(u == 0, 0.0, out)
    return out if out.ndim else float(out)


def goldbeter_koshland_du(u, v, J, K):
    """dG/du from the quadratic (v-u)G^2 - B G + uK = 0 that G solves."""
    G = np.asarray(goldbeter_koshland(u, v, J, K), float)
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    B = v - u + v * J + u * K
    Qu = -G * G - (K - 1.0) * G + K
    QG = 2.0 * (v - u) * G - B
    out = -Qu / QG
    return out if out.ndim else float(out)


def correlated_noise_factor(N) -> np.ndarray:
    """Lower-triangular F with F F^T = N."""
    return np.linalg.cholesky(np.asarray(N, float))


@dataclass(frozen=True)
class ActivatorInhibitorAnalytics:
    k: tuple      # (k0, ..., k7)
    J1: float
    J2: float
    N: np.ndarray

    def G(self, x1):
        k = self.k
        return goldbeter_koshland(k[3] * np.asarray(x1, float), k[4], self.J1, self.J2)

    def manifold(self, x1):
        """(x2, y) on the critical manifold as functions of x1."""
        k = self.k
        x1 = np.asarray(x1, float)
        x2 = k[5] / k[6] * x1
        y = (k[2] * x1 + k[7] * x1 * x2 - k[0] * self.G(x1)) / k[1]
        return x2, y

    def jacobian(self, x1, x2) -> np.ndarray:
        k = self.k
        Gu = goldbeter_koshland_du(k[3] * x1, k[4], self.J1, self.J2)
        return np.array([[k[0] * k[3] * Gu - k[2] - k[7] * x2, -k[7] * x1],
                         [k[5], -k[6]]])

    def trace_on_manifold(self, x1) -> float:
        x2, _ = self.manifold(x1)
        return float(np.trace(self.jacobian(float(x1), float(x2))))

    def hopf_points(self, x1_max: float = 5.0, n_scan: int = 5001, xtol: float = 1e-14) -> list:
        """[(x1, x2, y)] where the trace vanishes with positive determinant."""
        grid = np.linspace(1e-6, x1_max, n_scan)
        tr = np.array([self.trace_on_manifold(v) for v in grid])
        out = []
        for a, b, ta, tb in zip(grid[:-1], grid[1:], tr[:-1], tr[1:]):
            if ta == 0 or ta * tb < 0:
                x1 = brentq(self.trace_on_manifold, a, b, xtol=xtol, rtol=1e-15)
                x2, y = self.manifold(x1)
                if np.linalg.det(self.jacobian(x1, float(x2))) > 0:
                    out.append((float(x1), float(x2), float(y)))
        return out

    def branch(self, y, x1_hint: float = 0.3) -> np.ndarray:
        """Point on the lower attracting branch (y below the first Hopf point)."""
        x1h, _, yh = self.hopf_points()[0]
        if y > yh:
            raise ValueError("y lies beyond the first Hopf point")
        x1 = brentq(lambda v: float(self.manifold(v)[1]) - y, 1e-12, x1h, xtol=1e-15)
        return np.array([x1, float(self.manifold(x1)[0])])

    def to_dict(self) -> dict:
        hp = self.hopf_points()
        return {"k": list(self.k), "J1": self.J1, "J2": self.J2, "N": self.N.tolist(),
                "hopf_points": [list(p) for p in hp], "threshold": hp[0][2]}


_K_DEFAULT = (4.0, 1.0, 1.0, 1.0, 1.0, 0.1, 0.075, 1.0)
_N_DEFAULT = ((1.0, 0.2), (0.2, 1.0))


def activator_inhibitor(k=_K_DEFAULT, J1: float = 0.3, J2: float = 0.3, eps: float = 1e-5,
                        sigma: float = 1e-3, N=_N_DEFAULT, y0: float = 0.02,
                        y_end: float = 0.15) -> ModelPreset:
    k = tuple(float(v) for v in k)
    if len(k) != 8:
        raise ValueError("k must hold k0..k7")
    Nm = np.asarray(N, float)
    an = ActivatorInhibitorAnalytics(k, J1, J2, Nm)
    Fm = correlated_noise_factor(Nm)

    def f(x, y):
        x1, x2 = x[:, 0], x[:, 1]
        u = np.maximum(k[3] * x1, 0.0)
        G = goldbeter_koshland(u, k[4], J1, J2)
        return np.stack([k[0] * G + k[1] * y[:, 0] - k[2] * x1 - k[7] * x1 * x2,
                         k[5] * x1 - k[6] * x2], axis=1)

    def g(x, y):
        return np.ones_like(y)

    def F(x, y):
        return np.broadcast_to(Fm, (x.shape[0], 2, 2))

    system = FastSlowSystem(2, 1, f, g, F, 2, eps, sigma, name="ActivatorInhibitor")
    params = {"k": list(k), "J1": J1, "J2": J2, "eps": eps, "sigma": sigma, "N": Nm.tolist()}
    # Euler adds spurious growth ~ (dt/eps) |lambda|^2 / 2 to rotating modes; keep it small
    return ModelPreset("ActivatorInhibitor", params, system, an, an.branch(y0), np.array([y0]),
                       {"dt": eps / 50.0, "stride": 1, "s_end": y_end - y0, "coord": 0, "approach": "below",
                        "estimator": "m1", "window": 500, "detrend": "linear", "fit_range": (0.02, 0.085),
                        "laws": ("inv-rev", "inv-sqrt-rev")},
                       branch=lambda y: an.branch(float(y[0])))


@dataclass(frozen=True)
class HopfNormalFormAnalytics:
    N: np.ndarray
    threshold: float = 0.0

    def branch(self, y=None) -> np.ndarray:
        return np.zeros(2)

    def jacobian(self, y: float) -> np.ndarray:
        return np.array([[y, -1.0], [1.0, y]])

    def to_dict(self) -> dict:
        return {"N": self.N.tolist(), "threshold": self.threshold}


def hopf_normal_form(eps: float = 5e-4, sigma: float = 1e-3, N=_N_DEFAULT, y0: float = -0.3,
                     y_end: float = 0.02) -> ModelPreset:
    """Subcritical Hopf normal form with the activator-inhibitor noise, y' = 1."""
    Nm = np.asarray(N, float)
    Fm = correlated_noise_factor(Nm)

    def f(x, y):
        x1, x2 = x[:, 0], x[:, 1]
        yv = y[:, 0]
        r2 = x1 * x1 + x2 * x2
        return np.stack([yv * x1 - x2 + x1 * r2, x1 + yv * x2 + x2 * r2], axis=1)

    def g(x, y):
        return np.ones_like(y)

    def F(x, y):
        return np.broadcast_to(Fm, (x.shape[0], 2, 2))

    system = FastSlowSystem(2, 1, f, g, F, 2, eps, sigma, name="HopfNormalForm")
    return ModelPreset("HopfNormalForm", {"eps": eps, "sigma": sigma, "N": Nm.tolist()}, system,
                       HopfNormalFormAnalytics(Nm), np.zeros(2), np.array([y0]),
                       {"dt": eps / 500.0, "stride": 10, "s_end": y_end - y0, "coord": 0, "approach": "below",
                        "estimator": "m1", "window": 500, "detrend": "linear", "fit_range": (-0.3, -0.02),
                        "laws": ("inv-rev", "inv-sqrt-rev")},
                       branch=lambda y: np.zeros(2))
