"""Catalog normal forms as simulation presets with a constant slow drift."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..normal_forms import Kind, batch_vector_field, critical_manifold_branch, entry
from ..sde_engine import FastSlowSystem
from .base import ModelPreset

__all__ = ["normal_form_preset"]


def normal_form_preset(kind, aux: Optional[dict] = None, g: Sequence[float] = (1.0,), eps: float = 0.01,
                       sigma: float = 0.01, y0: Sequence[float] = (-1.0,), y_end: float = -0.01,
                       coord: int = 0, noise=None) -> ModelPreset:
    """dx = f(x, y)/eps ds + sigma/sqrt(eps) F dW, dy = g ds, started on the attracting branch.

    ``noise`` is a constant m x k matrix F (identity by default).
    """
    e = entry(Kind(kind), **(aux or {}))
    gv = np.asarray(g, float)
    y0v = np.asarray(y0, float)
    if gv.shape != (e.n,) or y0v.shape != (e.n,):
        raise ValueError(f"{e.kind.value} needs {e.n} slow components")
    if gv[coord] == 0 or np.sign(y_end - y0v[coord]) != np.sign(gv[coord]):
        raise ValueError("slow drift does not move y toward y_end")
    Fm = np.eye(e.m) if noise is None else np.atleast_2d(np.asarray(noise, float))
    if Fm.shape[0] != e.m:
        raise ValueError(f"noise matrix needs {e.m} rows")

    def f(x, y):
        return batch_vector_field(e, x, y)

    def gfun(x, y):
        return np.broadcast_to(gv, y.shape).copy()

    def F(x, y):
        return np.broadcast_to(Fm, (x.shape[0],) + Fm.shape)

    system = FastSlowSystem(e.m, e.n, f, gfun, F, Fm.shape[1], eps, sigma, name=f"NormalForm[{e.kind.value}]")
    x0 = critical_manifold_branch(e, y0v)
    params = {"kind": e.kind.value, "aux": dict(aux or {}), "g": gv.tolist(), "eps": eps, "sigma": sigma}
    return ModelPreset("NormalForm", params, system, e, x0, y0v,
                       {"dt": eps / 10.0, "stride": 1, "s_end": float(abs(y_end - y0v[coord]) / abs(gv[coord])),
                        "coord": coord, "approach": "below" if gv[coord] > 0 else "above",
                        "estimator": "m3", "window": 100, "detrend": "none",
                        "fit_range": _fit_range(float(y0v[coord]), float(y_end)),
                        "laws": ("inv-sqrt-rev", "inv-rev")},
                       branch=lambda y: critical_manifold_branch(e, y))


def _fit_range(a: float, b: float):
    # skip the first tenth of the approach, where the start is still relaxing
    a = a + 0.1 * (b - a)
    return (min(a, b), max(a, b))

