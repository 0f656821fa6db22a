"""Variance-based early-warning estimators and scaling-law fits."""

from ..series import CovarianceSeries
from .estimators import (CriticalManifold, ensemble_pointwise_moments, ensemble_sliding_window_variance,
                         frozen_variance_scan, sliding_window_variance)
from .fitting import (BreakpointFit, Law, LinearFit, ScalingFit, TrendResult, compare_laws, fit_scaling,
                      law_model, linear_fit, piecewise_linear_break, trend_test)

__all__ = [
    "CovarianceSeries", "CriticalManifold", "ensemble_pointwise_moments",
    "ensemble_sliding_window_variance", "frozen_variance_scan", "sliding_window_variance", "Law",
    "LinearFit", "ScalingFit", "TrendResult", "compare_laws", "fit_scaling", "law_model", "linear_fit",
    "trend_test", "BreakpointFit", "piecewise_linear_break",
]
