"""Command-line front end: presets, simulation, estimation, fitting and verification."""

from .experiment import ESTIMATORS, SCHEMA, ExperimentSpec, SpecError, build_preset, load_spec
from .main import build_parser, main
from .pipeline import AnalysisError, check_manifest, estimate, fit_series, run_experiment, simulate_preset
from .verify import SUITES, CaseResult, run_suite

__all__ = [
    "ESTIMATORS", "SCHEMA", "ExperimentSpec", "SpecError", "build_preset", "load_spec", "build_parser",
    "main", "AnalysisError", "check_manifest", "estimate", "fit_series", "run_experiment",
    "simulate_preset", "SUITES", "CaseResult", "run_suite",
]
