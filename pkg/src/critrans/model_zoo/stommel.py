"""Stommel-Cessi box model for the thermohaline circulation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..sde_engine import FastSlowSystem
from .base import ModelPreset

__all__ = ["StommelAnalytics", "stommel_cessi"]


@dataclass(frozen=True)
class StommelAnalytics:
    eta2: float

    def h0(self, x):
        x = np.asarray(x, float)
        return x * (1.0 + self.eta2 * (1.0 - x) ** 2)

    def dh0(self, x):
        x = np.asarray(x, float)
        return 1.0 + self.eta2 * (1.0 - x) * (1.0 - 3.0 * x)

    def fold_points(self):
        """((x-, y-), (x+, y+)) where h0'(x) = 0."""
        e = self.eta2
        disc = e * e - 3.0 * e
        if disc <= 0:
            raise ValueError("h0 is monotone for eta2 <= 3: no folds")
        r = math.sqrt(disc)
        xm = (2.0 * e - r) / (3.0 * e)
        xp = (2.0 * e + r) / (3.0 * e)
        return (xm, float(self.h0(xm))), (xp, float(self.h0(xp)))

    def jacobian(self, x) -> float:
        return -float(self.dh0(x))

    def upper_branch(self, y):
        """x on the attracting branch x > x+ with h0(x) = y (requires y > y+)."""
        (_, _), (xp, yp) = self.fold_points()
        y = np.asarray(y, float)
        out = np.empty(y.shape)
        for i, yv in np.ndenumerate(y):
            if yv < yp:
                raise ValueError(f"y={yv} below the upper fold y+={yp}")
            if yv == yp:
                out[i] = xp
                continue
            hi = xp + 1.0
            while self.h0(hi) < yv:
                hi *= 2.0
            out[i] = brentq(lambda x: float(self.h0(x)) - yv, xp, hi, xtol=1e-15, rtol=1e-15)
        return out if out.ndim else float(out)

    def to_dict(self) -> dict:
        (xm, ym), (xp, yp) = self.fold_points()
        return {"eta2": self.eta2, "fold_lower": [xm, ym], "fold_upper": [xp, yp],
                "threshold": yp}


def stommel_cessi(eta2: float = 7.5, eps: float = 0.01, sigma: float = 0.01, y0: float = 1.5,
                  y_end: float = 0.95) -> ModelPreset:
    an = StommelAnalytics(eta2)

    def f(x, y):
        xv = x[:, :1]
        return y[:, :1] - xv * (1.0 + eta2 * (1.0 - xv) ** 2)

    def g(x, y):
        return -np.ones_like(y)

    def F(x, y):
        return np.ones((x.shape[0], 1, 1))

    system = FastSlowSystem(1, 1, f, g, F, 1, eps, sigma, name="StommelCessi")
    x0 = np.array([an.upper_branch(y0)])
    return ModelPreset("StommelCessi", {"eta2": eta2, "eps": eps, "sigma": sigma}, system, an,
                       x0, np.array([y0]),
                       {"dt": eps / 20.0, "stride": 1, "s_end": y0 - y_end, "coord": 0, "approach": "above",
                        "estimator": "m3", "window": 80, "detrend": "none", "fit_range": (0.95, 1.45),
                        "laws": ("inv-sqrt",)},
                       branch=lambda y: np.array([an.upper_branch(max(float(y[0]), an.fold_points()[1][1]))]))
