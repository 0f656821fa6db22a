"""Variance estimators: sliding windows (M1, M2), path ensembles (M3), frozen fast runs (M4)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..sde_engine import FastSlowSystem, Path, PathEnsemble, frozen_fast_batch
from ..series import CovarianceSeries

__all__ = [
    "CriticalManifold",
    "sliding_window_variance",
    "ensemble_sliding_window_variance",
    "ensemble_pointwise_moments",
    "frozen_variance_scan",
]

_MAX_CHUNK_ELEMS = 4_000_000


@dataclass(frozen=True)
class CriticalManifold:
    """Detrend by subtracting h0(y) pointwise; h0 maps (G, n) slow states to (G, m)."""

    h0: Callable


Detrend = Union[None, str, CriticalManifold]


def _detrend_kind(detrend: Detrend) -> str:
    if detrend is None or detrend == "none":
        return "none"
    if detrend == "linear":
        return "linear"
    if isinstance(detrend, CriticalManifold):
        return "cm"
    raise ValueError(f"unknown detrend option {detrend!r}")


def _window_cov(x: np.ndarray, s: np.ndarray, window: int, linear: bool) -> np.ndarray:
    """Covariance of every run of window+1 consecutive rows of x (L, m).

    Running sums over chunks of windows; each chunk is re-centred on its first
    sample, which bounds round-off and keeps constant runs exactly zero.
    """
    L, m = x.shape
    n = window + 1
    G = L - window
    out = np.empty((G, m, m))
    chunk = max(1, min(G, _MAX_CHUNK_ELEMS // (n * (m * m + 2 * m + 2)) * n))
    if linear:
        # short chunks keep the time offsets comparable to the window span
        chunk = min(chunk, 4 * n)
    for a in range(0, G, chunk):
        b = min(G, a + chunk)
        xs = x[a:b + window] - x[a]
        ts = s[a:b + window] - s[a]

        def wsum(v):
            c = np.concatenate([np.zeros((1,) + v.shape[1:]), np.cumsum(v, axis=0)])
            return c[n:] - c[:-n]

        Sx = wsum(xs)
        Cxx = wsum(xs[:, :, None] * xs[:, None, :]) - Sx[:, :, None] * Sx[:, None, :] / n
        if linear:
            St = wsum(ts)
            Ctt = wsum(ts * ts) - St * St / n
            Cxt = wsum(xs * ts[:, None]) - Sx * St[:, None] / n
            Cxx = Cxx - Cxt[:, :, None] * Cxt[:, None, :] / Ctt[:, None, None]
        out[a:b] = Cxx / window
    return out


def sliding_window_variance(series: Path, window: int, detrend: Detrend = None) -> CovarianceSeries:
    """Moving-window sample covariance over window+1 consecutive points.

    Each estimate is attributed to the mean slow state of its window; windows
    that would run past either end are dropped.
    """
    kind = _detrend_kind(detrend)
    x = np.asarray(series.x, dtype=float)
    y = np.asarray(series.y, dtype=float)
    s = np.asarray(series.s, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if window < 2:
        raise ValueError("window must be >= 2")
    if len(x) <= window:
        raise ValueError(f"window {window} exceeds series length {len(x)}")
    if kind == "cm":
        x = x - np.asarray(detrend.h0(y), dtype=float).reshape(x.shape)
    cov = _window_cov(x, s, window, kind == "linear")
    ymid = sliding_window_view(y, window + 1, axis=0).mean(axis=2)
    smid = sliding_window_view(s, window + 1).mean(axis=1)
    method = {"none": "M1", "linear": "M2Linear", "cm": "M2CM"}[kind]
    return CovarianceSeries(ymid[:, 0] if ymid.shape[1] == 1 else ymid, cov, method, window, 1, smid)


def ensemble_sliding_window_variance(ensemble: PathEnsemble, window: int,
                                     detrend: Detrend = None) -> CovarianceSeries:
    """Sliding-window covariance of each path, averaged over paths.

    Windows touching a truncated (blown-up) part of a path are left out of the
    average at that position.
    """
    total = None
    count = None
    first = None
    for r in range(ensemble.n_paths):
        est = sliding_window_variance(ensemble.path(r), window, detrend)
        ok = np.all(np.isfinite(est.cov), axis=(1, 2))
        c = np.where(ok[:, None, None], est.cov, 0.0)
        if total is None:
            total, count, first = c, ok.astype(int), est
        else:
            total = total + c
            count = count + ok
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = total / count[:, None, None]
    mean[count == 0] = np.nan
    return CovarianceSeries(first.y, mean, first.method, window, int(count.min()), first.s,
                            {"paths_per_point": count})


def ensemble_pointwise_moments(ensemble: PathEnsemble) -> CovarianceSeries:
    """Unbiased cross-path covariance at every grid point (M3)."""
    x = ensemble.x
    R = x.shape[0]
    if R < 2:
        raise ValueError("need at least two paths")
    finite = np.isfinite(x).all(axis=2)            # (R, G)
    count = finite.sum(axis=0)
    # shift by one finite sample per grid point so identical paths give exact zeros
    ref_idx = np.argmax(finite, axis=0)
    ref = x[ref_idx, np.arange(x.shape[1])]
    d = np.where(finite[:, :, None], x - ref[None], 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = d.sum(axis=0) / count[:, None]
        c = np.where(finite[:, :, None], d - mean[None], 0.0)
        cov = np.einsum("rgi,rgj->gij", c, c) / (count - 1)[:, None, None]
    cov[count < 2] = np.nan
    y = ensemble.y_grid
    return CovarianceSeries(y[:, 0] if y.shape[1] == 1 else y, cov, "M3", None, int(count.min()),
                            ensemble.s.copy())


def frozen_variance_scan(system: FastSlowSystem, y_values, t_end: float, burn_in: Optional[float] = None,
                         seed: int = 0, dt_fast: float = 0.01, x0=None,
                         replicates: int = 1) -> CovarianceSeries:
    """Time-averaged covariance of the fast subsystem at each frozen y (M4).

    ``x0`` is a start state, one row per y value, or a callable y -> state.
    With ``replicates > 1`` independent runs per y are pooled.
    """
    Y = np.asarray(y_values, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None] if system.n == 1 else Y[None, :]
    J = len(Y)
    if burn_in is None:
        burn_in = 0.2 * t_end
    if not 0 <= burn_in < t_end:
        raise ValueError("burn_in must lie in [0, t_end)")
    if callable(x0):
        X0 = np.array([np.asarray(x0(yv), float) for yv in Y])
    elif x0 is None:
        X0 = np.zeros((J, system.m))
    else:
        X0 = np.asarray(x0, float)
        X0 = np.broadcast_to(X0, (J, system.m)) if X0.ndim == 1 else X0
    Yb = np.repeat(Y, replicates, axis=0)
    Xb = np.repeat(X0, replicates, axis=0)
    idx = np.arange(J * replicates)
    ens = frozen_fast_batch(system, Yb, Xb, t_end, dt_fast, seed, idx)
    keep = ens.s >= burn_in
    cov = np.empty((J, system.m, system.m))
    for j in range(J):
        samples = ens.x[j * replicates:(j + 1) * replicates, keep].reshape(-1, system.m)
        samples = samples[np.isfinite(samples).all(axis=1)]
        if len(samples) < 2:
            cov[j] = np.nan
            continue
        d = samples - samples[:1]
        d = d - d.mean(axis=0)
        cov[j] = d.T @ d / (len(d) - 1)
    yout = Y[:, 0] if Y.shape[1] == 1 else Y
    return CovarianceSeries(yout, cov, "M4", None, replicates, None,
                            {"t_end": t_end, "burn_in": burn_in, "dt_fast": dt_fast})
