"""Quintic subcritical pitchfork for a compressed spring (Euler buckling)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..sde_engine import FastSlowSystem
from .base import ModelPreset

__all__ = ["NoiseShape", "BucklingAnalytics", "euler_buckling"]


class NoiseShape(str, Enum):
    CONST = "const"
    SQRT_GAP = "sqrt-gap"
    LINEAR_GAP = "linear-gap"


# leading-order variance sigma^2 F(y)^2 / (2 p1 (y_c - y)) for each shape
_BEHAVIOR = {
    NoiseShape.CONST: ("increasing", "grows like 1/(y_c - y)"),
    NoiseShape.SQRT_GAP: ("trend-free", "bounded, tends to a constant"),
    NoiseShape.LINEAR_GAP: ("decreasing", "decays like (y_c - y)"),
}


def noise_amplitude(shape: NoiseShape, y, y_c: float):
    gap = y_c - np.asarray(y, float)
    if shape is NoiseShape.CONST:
        return np.ones_like(gap)
    if shape is NoiseShape.SQRT_GAP:
        return np.sqrt(np.maximum(gap, 0.0))
    return gap


@dataclass(frozen=True)
class BucklingAnalytics:
    p1: float
    p2: float
    p3: float
    p4: float
    shape: NoiseShape

    @property
    def threshold(self) -> float:
        return self.p2

    @property
    def shapes_equal_at(self) -> float:
        """y* where 1 = sqrt(y_c - y) = y_c - y."""
        return self.p2 - 1.0

    def branch(self, y=None) -> np.ndarray:
        return np.zeros(1)

    def jacobian(self, y: float) -> np.ndarray:
        return np.array([[self.p1 * (y - self.p2)]])

    def predicted_variance(self, y, sigma: float):
        """sigma^2 F(y)^2 / (2 p1 (y_c - y)) from the one-dimensional Lyapunov equation."""
        y = np.asarray(y, float)
        Fy = noise_amplitude(self.shape, y, self.p2)
        return sigma ** 2 * Fy ** 2 / (2.0 * self.p1 * (self.p2 - y))

    def behavior(self) -> str:
        return _BEHAVIOR[self.shape][0]

    def to_dict(self) -> dict:
        return {"p": [self.p1, self.p2, self.p3, self.p4], "noise_shape": self.shape.value,
                "threshold": self.threshold, "shapes_equal_at": self.shapes_equal_at,
                "predicted_trend": _BEHAVIOR[self.shape][0], "predicted_law": _BEHAVIOR[self.shape][1]}


def euler_buckling(p1: float = 2.639, p2: float = 3.3, p3: float = 106.512, p4: float = 385.0,
                   eps: float = 0.005, sigma: float = 0.007, noise_shape="const", y0: float = 2.0,
                   y_end: float = 3.3) -> ModelPreset:
    shape = NoiseShape(noise_shape)
    an = BucklingAnalytics(p1, p2, p3, p4, shape)

    def f(x, y):
        xv = x[:, :1]
        return p1 * (y[:, :1] - p2) * xv + p3 * xv ** 3 - p4 * xv ** 5

    def g(x, y):
        return np.ones_like(y)

    def F(x, y):
        return noise_amplitude(shape, y[:, 0], p2)[:, None, None]

    system = FastSlowSystem(1, 1, f, g, F, 1, eps, sigma, name=f"EulerBuckling[{shape.value}]")
    return ModelPreset("EulerBuckling", {"p1": p1, "p2": p2, "p3": p3, "p4": p4, "eps": eps,
                                         "sigma": sigma, "noise_shape": shape.value},
                       system, an, np.zeros(1), np.array([y0]),
                       {"dt": eps / 10.0, "stride": 1, "s_end": y_end - y0, "coord": 0, "approach": "below",
                        "estimator": "m3", "window": 200, "detrend": "none", "fit_range": (2.05, 3.1),
                        "laws": ("inv-rev",) if shape is NoiseShape.CONST else ("linear",)},
                       branch=lambda y: np.zeros(1))
