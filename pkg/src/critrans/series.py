"""Covariance time series shared by the ODE integrator and the estimators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["CovarianceSeries", "METHODS"]

METHODS = ("M1", "M2Linear", "M2CM", "M3", "M4", "LinearizedODE")


@dataclass
class CovarianceSeries:
    """Estimated covariance matrices along a slow-variable grid.

    ``y`` has shape (G,) or (G, n); ``cov`` has shape (G, m, m).
    """

    y: np.ndarray
    cov: np.ndarray
    method: str
    window: Optional[int] = None
    n_paths_used: int = 1
    s: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim == 1:
            cov = cov[:, None, None]
        self.cov = cov
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if len(self.y) != len(self.cov):
            raise ValueError("y and cov lengths differ")

    def __len__(self) -> int:
        return len(self.cov)

    @property
    def m(self) -> int:
        return self.cov.shape[1]

    @property
    def variance(self) -> np.ndarray:
        """Diagonal entries, shape (G, m)."""
        return np.diagonal(self.cov, axis1=1, axis2=2).copy()

    def entry(self, i: int, j: int) -> np.ndarray:
        return self.cov[:, i, j].copy()

    def coordinate(self, i: int = 0) -> np.ndarray:
        """The i-th slow coordinate along the grid."""
        return self.y if self.y.ndim == 1 else self.y[:, i]

    def restrict(self, lo: float, hi: float, coord: int = 0) -> "CovarianceSeries":
        c = self.coordinate(coord)
        keep = (c >= lo) & (c <= hi) & np.all(np.isfinite(self.cov), axis=(1, 2))
        return CovarianceSeries(self.y[keep], self.cov[keep], self.method, self.window,
                                self.n_paths_used, None if self.s is None else self.s[keep],
                                dict(self.meta))
