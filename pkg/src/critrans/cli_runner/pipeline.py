"""simulate -> estimate -> fit, with a manifest for exact re-runs."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

import numpy as np
import scipy

from .. import __version__
from ..model_zoo import ModelPreset
from ..sde_engine import PathEnsemble, SimConfig, simulate_ensemble, write_binary, write_csv
from ..series import CovarianceSeries
from ..warning_signs import (CriticalManifold, Law, compare_laws, ensemble_pointwise_moments,
                             ensemble_sliding_window_variance, frozen_variance_scan, trend_test)
from .artifacts import sha256_file, write_json, write_variance_csv
from .experiment import ExperimentSpec, SpecError

__all__ = ["AnalysisError", "simulate_preset", "estimate", "fit_series", "run_experiment",
           "critical_manifold_for", "check_manifest"]


class AnalysisError(RuntimeError):
    """A downstream numerical step produced no usable result."""


def simulate_preset(preset: ModelPreset, sim: dict, seed: int) -> PathEnsemble:
    cfg = SimConfig(dt=sim["dt"], s_end=sim["s_end"], record_stride=sim["record_stride"],
                    master_seed=seed, n_paths=sim["n_paths"], allow_coarse=sim["allow_coarse"])
    try:
        return simulate_ensemble(preset.system, cfg, preset.x0, preset.y0, workers=sim.get("workers", 1))
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def critical_manifold_for(preset: ModelPreset) -> CriticalManifold:
    def h0(Y):
        return np.array([preset.branch_at(y) for y in np.atleast_2d(Y)])
    return CriticalManifold(h0)


def estimate(est: dict, preset: Optional[ModelPreset], ensemble: Optional[PathEnsemble],
             seed: int = 0) -> CovarianceSeries:
    kind = est["kind"]
    if kind == "m4":
        if preset is None:
            raise SpecError("m4 needs a preset")
        return frozen_variance_scan(preset.system, est["y_values"], est["t_end"], burn_in=est.get("burn_in"),
                                    seed=seed, dt_fast=est["dt_fast"], x0=preset.branch_at,
                                    replicates=est["replicates"])
    if ensemble is None:
        raise SpecError(f"{kind} needs a path ensemble")
    if kind == "m3":
        return ensemble_pointwise_moments(ensemble)
    window = est["window"]
    if window >= len(ensemble.s):
        raise SpecError(f"window {window} is not shorter than the {len(ensemble.s)} recorded samples")
    if kind == "m1":
        return ensemble_sliding_window_variance(ensemble, window, None)
    if kind == "m2-linear":
        return ensemble_sliding_window_variance(ensemble, window, "linear")
    if kind == "m2-cm":
        if preset is None:
            raise SpecError("m2-cm needs a preset to supply the critical manifold")
        return ensemble_sliding_window_variance(ensemble, window, critical_manifold_for(preset))
    raise SpecError(f"unknown estimator {kind!r}")


def fit_series(series: CovarianceSeries, laws, component: int = 0, y_range=None, coord: int = 0) -> dict:
    """Rank the requested laws on the variance of one fast component."""
    y = series.coordinate(coord)
    V = series.cov[:, component, component]
    keep = np.isfinite(y) & np.isfinite(V)
    if y_range is not None:
        keep &= (y >= y_range[0]) & (y <= y_range[1])
    dropped = 0
    if all(Law(l) is not Law.LINEAR for l in laws):
        # the deterministic start gives exact zeros, which reciprocal laws cannot fit
        dropped = int(np.sum(keep & (V <= 0)))
        keep &= V > 0
    y, V = y[keep], V[keep]
    fits = compare_laws(y, V, laws)
    if not fits:
        raise AnalysisError(f"none of the laws {list(laws)} could be fitted to {len(y)} points")
    tr = trend_test(y, V)
    return {"component": component, "coord": coord, "y_range": None if y_range is None else list(y_range),
            "n_points": int(len(y)), "dropped_nonpositive": dropped, "fits": [f.as_dict() for f in fits], "best": fits[0].law.value,
            "y_c": fits[0].y_c, "trend": {"tau": tr.tau, "pvalue": tr.pvalue, "label": tr.label}}


def run_experiment(spec: ExperimentSpec, out_dir=None) -> dict:
    """Execute the experiment and write its artifacts; returns the manifest."""
    r = spec.resolved
    out = Path(out_dir if out_dir is not None else r["output"]["dir"])
    out.mkdir(parents=True, exist_ok=True)
    preset = spec.preset
    files = {}
    ens = None
    est = r["estimator"]
    if est["kind"] != "m4":
        ens = simulate_preset(preset, r["sim"], r["seed"])
        fmt = r["output"]["ensemble_format"]
        if fmt == "csv":
            write_csv(ens, out / "ensemble.csv")
            files["ensemble"] = "ensemble.csv"
        elif fmt == "binary":
            write_binary(ens, out / "ensemble.bin")
            files["ensemble"] = "ensemble.bin"
    series = estimate(est, preset, ens, r["seed"])
    write_variance_csv(series, out / "variance.csv")
    files["variance"] = "variance.csv"
    fit = r["fit"]
    result = fit_series(series, fit["laws"], fit["component"], fit["y_range"], preset.defaults.get("coord", 0))
    result["method"] = series.method
    result["analytic"] = _analytic_summary(preset)
    write_json(result, out / "fit.json")
    files["fit"] = "fit.json"
    manifest = {
        "spec": r,
        "code_version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "preset_id": preset.id,
        "blowups": None if ens is None else int(ens.blowup.sum()),
        "files": {k: {"path": v, "sha256": sha256_file(out / v)} for k, v in sorted(files.items())},
    }
    write_json(manifest, out / "manifest.json")
    return manifest


def _analytic_summary(preset: ModelPreset) -> dict:
    an = preset.analytics
    to_dict = getattr(an, "to_dict", None)
    if to_dict is None:
        return {}
    try:
        return to_dict()
    except (ValueError, RuntimeError):
        return {}


def check_manifest(manifest: dict, out_dir) -> list:
    """Files whose hash differs from the recorded one (empty when reproduced)."""
    bad = []
    for name, rec in manifest["files"].items():
        p = os.path.join(out_dir, rec["path"])
        if not os.path.exists(p) or sha256_file(p) != rec["sha256"]:
            bad.append(name)
    return bad
