"""Euler-Maruyama integration of fast-slow SDEs.

    dx = (1/eps) f(x, y) ds + (sigma / sqrt(eps)) F(x, y) dW,   dy = g(x, y) ds

The drift, slow drift and diffusion callables are vectorized over a leading
batch axis: ``f(x, y)`` receives x of shape (B, m) and y of shape (B, n) and
returns (B, m); ``g`` returns (B, n); ``F`` returns (B, m, k). Each row is
computed independently, so a path gives the same bits whether it runs alone or
inside any batch.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .rng import gaussian_block

__all__ = [
    "Box",
    "FastSlowSystem",
    "SimConfig",
    "Path",
    "PathEnsemble",
    "euler_maruyama",
    "simulate_ensemble",
    "simulate_frozen_fast",
    "frozen_fast_batch",
]

_CHUNK_STEPS = 2048


@dataclass(frozen=True)
class Box:
    """Axis-aligned box for the fast variables; only flagged axes are clamped."""

    lower: tuple
    upper: tuple
    clamp: tuple

    def __post_init__(self):
        lo = np.asarray(self.lower, float)
        hi = np.asarray(self.upper, float)
        if lo.shape != hi.shape or len(self.clamp) != lo.size:
            raise ValueError("box bounds and clamp flags must have equal length")
        if np.any(lo > hi):
            raise ValueError("box lower bound exceeds upper bound")

    def contains(self, x) -> bool:
        x = np.asarray(x, float)
        return bool(np.all(x >= np.asarray(self.lower)) and np.all(x <= np.asarray(self.upper)))


@dataclass
class FastSlowSystem:
    m: int
    n: int
    f: Callable
    g: Callable
    F: Callable
    k: int
    eps: float
    sigma: float
    domain: Optional[Box] = None
    name: str = "custom"

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.domain is not None and len(self.domain.lower) != self.m:
            raise ValueError("domain box dimension must equal m")

    def drift(self, x, y) -> np.ndarray:
        """Fast drift at a single point."""
        return np.asarray(self.f(np.atleast_2d(np.asarray(x, float)),
                                 np.atleast_2d(np.asarray(y, float))))[0]


@dataclass(frozen=True)
class SimConfig:
    dt: float
    s_end: float
    record_stride: int = 1
    master_seed: int = 0
    n_paths: int = 1
    allow_coarse: bool = False
    blowup_bound: float = 1e10

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.s_end < 0:
            raise ValueError("s_end must be nonnegative")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.s_end / self.dt - 1e-9))

    def check_against(self, system: FastSlowSystem) -> None:
        if not self.allow_coarse and self.dt > system.eps / 5.0 * (1 + 1e-12):
            raise ValueError(
                f"dt={self.dt:g} does not resolve the fast scale (need dt <= eps/5 = "
                f"{system.eps / 5:g}); set allow_coarse to override")


@dataclass
class Path:
    s: np.ndarray
    y: np.ndarray
    x: np.ndarray
    path_index: int
    master_seed: int
    clamp_events: int = 0
    blowup: bool = False
    blowup_step: Optional[int] = None


@dataclass
class PathEnsemble:
    s: np.ndarray             # (G,)
    y: np.ndarray             # (R, G, n)
    x: np.ndarray             # (R, G, m)
    path_indices: np.ndarray  # (R,)
    master_seed: int
    clamp_events: np.ndarray  # (R,)
    blowup: np.ndarray        # (R,) bool
    blowup_step: np.ndarray   # (R,) int, -1 when no blow-up
    dt: float = float("nan")

    @property
    def n_paths(self) -> int:
        return self.x.shape[0]

    @property
    def y_grid(self) -> np.ndarray:
        return self.y[0]

    @property
    def seeds(self) -> np.ndarray:
        """Per-path sub-seeds as (master_seed, path_index) pairs of the Philox key."""
        return np.stack([np.full(self.n_paths, self.master_seed & ((1 << 64) - 1), dtype=np.uint64),
                         self.path_indices.astype(np.uint64)], axis=1)

    def path(self, r: int) -> Path:
        bs = int(self.blowup_step[r])
        return Path(self.s.copy(), self.y[r].copy(), self.x[r].copy(), int(self.path_indices[r]),
                    self.master_seed, int(self.clamp_events[r]), bool(self.blowup[r]),
                    None if bs < 0 else bs)

    @classmethod
    def concatenate(cls, parts: Sequence["PathEnsemble"]) -> "PathEnsemble":
        first = parts[0]
        return cls(first.s, np.concatenate([p.y for p in parts]), np.concatenate([p.x for p in parts]),
                   np.concatenate([p.path_indices for p in parts]), first.master_seed,
                   np.concatenate([p.clamp_events for p in parts]),
                   np.concatenate([p.blowup for p in parts]),
                   np.concatenate([p.blowup_step for p in parts]), first.dt)


def _broadcast_start(v, size: int, batch: int) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 1:
        if arr.shape != (size,):
            raise ValueError(f"initial state must have length {size}")
        arr = np.broadcast_to(arr, (batch, size))
    if arr.shape != (batch, size):
        raise ValueError(f"initial state must have shape ({size},) or ({batch}, {size})")
    return np.array(arr, dtype=float)


def _run_batch(system: FastSlowSystem, dt: float, n_steps: int, stride: int, master_seed: int,
               path_indices: np.ndarray, x0: np.ndarray, y0: np.ndarray, bound: float,
               eps: float) -> PathEnsemble:
    B = len(path_indices)
    m, n, k = system.m, system.n, system.k
    x = x0.copy()
    y = y0.copy()
    rec_steps = list(range(0, n_steps + 1, stride))
    G = len(rec_steps)
    xs = np.empty((B, G, m))
    ys = np.empty((B, G, n))
    xs[:, 0] = x
    ys[:, 0] = y
    clamp_events = np.zeros(B, dtype=np.int64)
    alive = np.ones(B, dtype=bool)
    blow_step = np.full(B, -1, dtype=np.int64)

    box = system.domain
    if box is not None:
        lo = np.asarray(box.lower, float)
        hi = np.asarray(box.upper, float)
        cmask = np.asarray(box.clamp, bool)
        do_clamp = bool(cmask.any())
    else:
        do_clamp = False

    drift_fac = dt / eps
    noise_fac = system.sigma * math.sqrt(dt / eps)
    use_noise = system.sigma != 0.0
    rec = 1
    with np.errstate(all="ignore"):
        for c0 in range(0, n_steps, _CHUNK_STEPS):
            c1 = min(n_steps, c0 + _CHUNK_STEPS)
            if use_noise:
                xi = np.stack([gaussian_block(master_seed, int(p), c0, c1 - c0, k) for p in path_indices])
            for j in range(c0, c1):
                fx = np.asarray(system.f(x, y), dtype=float)
                gy = np.asarray(system.g(x, y), dtype=float)
                x_new = x + drift_fac * fx
                if use_noise:
                    Fx = np.asarray(system.F(x, y), dtype=float)
                    x_new = x_new + noise_fac * (Fx * xi[:, None, j - c0, :]).sum(axis=-1)
                y = y + dt * gy
                if do_clamp:
                    below = (x_new < lo) & cmask
                    above = (x_new > hi) & cmask
                    clamp_events += (below | above).sum(axis=1)
                    x_new = np.where(below, lo, np.where(above, hi, x_new))
                bad = alive & ~(np.isfinite(x_new).all(axis=1) & (np.abs(x_new).max(axis=1) <= bound))
                if bad.any():
                    blow_step[bad] = j + 1
                    alive &= ~bad
                x_new[~alive] = np.nan
                x = x_new
                if rec < G and j + 1 == rec_steps[rec]:
                    xs[:, rec] = x
                    ys[:, rec] = y
                    rec += 1
    s = np.array(rec_steps, dtype=float) * dt
    return PathEnsemble(s, ys, xs, np.asarray(path_indices, dtype=np.int64), int(master_seed),
                        clamp_events, ~alive, blow_step, dt)


def _check_start(system: FastSlowSystem, x0: np.ndarray) -> None:
    if system.domain is not None:
        for row in x0:
            if not system.domain.contains(row):
                raise ValueError(f"initial state {row} lies outside the domain box")


def euler_maruyama(system: FastSlowSystem, config: SimConfig, x0, y0, path_index: int = 0) -> Path:
    config.check_against(system)
    x = _broadcast_start(x0, system.m, 1)
    y = _broadcast_start(y0, system.n, 1)
    _check_start(system, x)
    ens = _run_batch(system, config.dt, config.n_steps, config.record_stride, config.master_seed,
                     np.array([path_index]), x, y, config.blowup_bound, system.eps)
    return ens.path(0)


def simulate_ensemble(system: FastSlowSystem, config: SimConfig, x0, y0, workers: int = 1,
                      path_indices: Optional[Sequence[int]] = None,
                      shard_size: Optional[int] = None) -> PathEnsemble:
    """Run ``config.n_paths`` paths (indices 0..R-1 unless given).

    ``x0``/``y0`` may be a single state or one row per path. Shards run on a
    thread pool; the result does not depend on ``workers`` or ``shard_size``.
    """
    config.check_against(system)
    idx = np.arange(config.n_paths) if path_indices is None else np.asarray(path_indices, dtype=np.int64)
    R = len(idx)
    x = _broadcast_start(x0, system.m, R)
    y = _broadcast_start(y0, system.n, R)
    _check_start(system, x)
    if shard_size is None:
        shard_size = max(1, -(-R // max(1, workers)))
    bounds = [(a, min(R, a + shard_size)) for a in range(0, R, shard_size)]

    def run(b):
        a, c = b
        return _run_batch(system, config.dt, config.n_steps, config.record_stride, config.master_seed,
                          idx[a:c], x[a:c], y[a:c], config.blowup_bound, system.eps)

    if workers <= 1 or len(bounds) == 1:
        parts = [run(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, bounds))
    return PathEnsemble.concatenate(parts)


def _frozen_system(system: FastSlowSystem) -> FastSlowSystem:
    # fast time: eps drops out and the slow variable is held fixed
    return replace(system, eps=1.0, g=lambda x, y: np.zeros_like(y))


def frozen_fast_batch(system: FastSlowSystem, Y, x0, t_end: float, dt_fast: float, seed: int,
                      path_indices: Sequence[int], record_stride: int = 1) -> PathEnsemble:
    """Fast-subsystem runs with one frozen slow value per row of Y."""
    fs = _frozen_system(system)
    idx = np.asarray(path_indices, dtype=np.int64)
    R = len(idx)
    Yb = _broadcast_start(Y, system.n, R)
    xb = _broadcast_start(np.zeros(system.m) if x0 is None else x0, system.m, R)
    _check_start(fs, xb)
    cfg = SimConfig(dt=dt_fast, s_end=t_end, record_stride=record_stride, master_seed=seed,
                    n_paths=R, allow_coarse=True)
    return _run_batch(fs, cfg.dt, cfg.n_steps, cfg.record_stride, seed, idx, xb, Yb,
                      cfg.blowup_bound, 1.0)


def simulate_frozen_fast(system: FastSlowSystem, y_fixed, t_end: float, dt_fast: float, seed: int,
                         x0=None, path_index: int = 0) -> Path:
    """Integrate dx = f(x, y_fixed) dt + sigma F dW on the fast time scale."""
    ens = frozen_fast_batch(system, np.atleast_1d(np.asarray(y_fixed, float)), x0, t_end, dt_fast,
                            seed, [path_index])
    return ens.path(0)
