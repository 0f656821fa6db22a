"""SIS epidemic on an adaptive network (pair-approximation moment closure)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sde_engine import Box, FastSlowSystem
from .base import ModelPreset

__all__ = ["SisAnalytics", "sis_adaptive"]


@dataclass(frozen=True)
class SisAnalytics:
    r: float
    w: float
    mu: float

    @property
    def threshold(self) -> float:
        return (self.r + self.w) / self.mu

    def trivial_branch(self, y=None) -> np.ndarray:
        return np.array([0.0, 0.0, self.mu / 2.0])

    def jacobian(self, y: float) -> np.ndarray:
        r, w, mu = self.r, self.w, self.mu
        c = y * mu - r - w
        return np.array([[-r, -y, -y],
                         [0.0, -y - 2.0 * r, -y],
                         [0.0, c, c]])

    def to_dict(self) -> dict:
        return {"r": self.r, "w": self.w, "mu": self.mu, "threshold": self.threshold,
                "trivial_branch": self.trivial_branch().tolist()}


def sis_adaptive(r: float = 0.002, w: float = 0.4, mu: float = 20.0, eps: float = 0.005,
                 sigmas=(0.01, 0.01, 0.01), y0: float = 0.005, y_end: float = 0.07) -> ModelPreset:
    an = SisAnalytics(r, w, mu)
    sig = np.asarray(sigmas, float)
    if sig.shape != (3,):
        raise ValueError("sigmas must have three entries")
    half = mu / 2.0

    def f(x, y):
        x1, x2, x3 = x[:, 0], x[:, 1], x[:, 2]
        p = y[:, 0]
        si = half - x2 - x3          # SI-link density
        inv = 1.0 / (1.0 - x1)
        return np.stack([p * si - r * x1,
                         p * si * (si * inv + 1.0) - 2.0 * r * x2,
                         (r + w) * si - 2.0 * p * si * x3 * inv], axis=1)

    def g(x, y):
        return np.ones_like(y)

    # sigma is carried by F so each coordinate can have its own amplitude
    Fd = np.diag(sig)

    def F(x, y):
        return np.broadcast_to(Fd, (x.shape[0], 3, 3))

    box = Box((0.0, 0.0, 0.0), (1.0, half, half), (True, True, True))
    system = FastSlowSystem(3, 1, f, g, F, 3, eps, 1.0, domain=box, name="SisAdaptive")
    return ModelPreset("SisAdaptive", {"r": r, "w": w, "mu": mu, "eps": eps, "sigmas": sig.tolist()},
                       system, an, an.trivial_branch(), np.array([y0]),
                       {"dt": 1e-5, "stride": 1, "s_end": y_end - y0, "coord": 0, "component": 2, "approach": "below",
                        "estimator": "m1", "window": 1000, "detrend": "none", "fit_range": (0.005, 0.04),
                        "laws": ("inv-rev",)},
                       branch=lambda y: an.trivial_branch())
