"""Seed-reproducible Euler-Maruyama simulation of fast-slow SDEs."""

from .engine import (Box, FastSlowSystem, Path, PathEnsemble, SimConfig, euler_maruyama,
                     frozen_fast_batch, simulate_ensemble, simulate_frozen_fast)
from .io import MAGIC, read_binary, read_csv, write_binary, write_csv
from .rng import gaussian_block, path_key

__all__ = [
    "Box", "FastSlowSystem", "Path", "PathEnsemble", "SimConfig", "euler_maruyama",
    "frozen_fast_batch", "simulate_ensemble", "simulate_frozen_fast", "MAGIC", "read_binary",
    "read_csv", "write_binary", "write_csv", "gaussian_block", "path_key",
]
