"""`critrans` command-line entry point.

Exit codes: 0 success, 1 verification or analysis failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..covariance_laws import covariance_closed_form
from ..model_zoo import PRESETS, equilibrium_branch_sweep
from ..normal_forms import Kind, SlowFlowData, attracting_sample, entry, explain_transition
from ..sde_engine import write_binary, write_csv
from ..warning_signs import Law
from .artifacts import dumps, fmt, read_ensemble, read_variance_csv, write_json, write_variance_csv
from .experiment import ESTIMATORS, ExperimentSpec, SpecError, build_preset, load_spec
from .pipeline import AnalysisError, check_manifest, estimate, fit_series, run_experiment, simulate_preset
from .verify import SUITES, run_suite

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _kv(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k, json.loads(v)
    except json.JSONDecodeError:
        return k, v


def _preset_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS), required=required)
    p.add_argument("--param", type=_kv, action="append", default=[], metavar="KEY=VALUE",
                   help="preset keyword argument; VALUE is parsed as JSON when possible")
    p.add_argument("--noise-shape", choices=["const", "sqrt-gap", "linear-gap"],
                   help="shortcut for --param noise_shape=... (buckling)")


def _sim_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--paths", type=int, help="number of sample paths")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--dt", type=float, help="step in slow time")
    p.add_argument("--s-end", type=float, help="slow-time horizon")
    p.add_argument("--stride", type=int, help="record every STRIDE steps")
    p.add_argument("--workers", type=int, help="threads for ensemble shards")
    p.add_argument("--allow-coarse", action="store_true", help="skip the dt <= eps/5 guard")


def _preset_spec(args) -> dict:
    params = dict(args.param)
    if args.noise_shape:
        if args.preset != "buckling":
            raise SpecError("--noise-shape applies to the buckling preset only")
        params["noise_shape"] = args.noise_shape
    spec = {"preset": args.preset}
    if params:
        spec["params"] = params
    return spec


def _sim_spec(args) -> dict:
    sim = {}
    for flag, key in [("paths", "n_paths"), ("dt", "dt"), ("s_end", "s_end"), ("stride", "record_stride"),
                      ("workers", "workers")]:
        v = getattr(args, flag)
        if v is not None:
            sim[key] = v
    if args.allow_coarse:
        sim["allow_coarse"] = True
    return sim


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="critrans", description="Critical transitions in stochastic fast-slow systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="decide whether a bifurcation passage is a critical transition")
    p.add_argument("--kind", required=True, choices=[k.value for k in Kind])
    p.add_argument("--g", type=float, nargs="+", required=True, help="slow drift g(0, 0), one value per slow variable")
    p.add_argument("--s", type=int, choices=[1, -1], help="sign parameter s")
    p.add_argument("--l1", type=float, help="first Lyapunov coefficient (hopf)")
    p.add_argument("--l2", type=int, choices=[1, -1], help="sign of the second Lyapunov coefficient (bautin)")
    p.add_argument("--theta0", type=float, help="theta(0) (fold-hopf)")
    p.add_argument("--dg2-dy2", type=float, help="d g2 / d y2 at the origin")
    p.add_argument("--j2", type=float, help="y2-tangent of the cycle blow-up curve (fold-hopf, s = -1)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("simulate", help="simulate a preset ensemble")
    _preset_args(p)
    _sim_args(p)
    p.add_argument("--out", required=True, help="output file (.csv or .bin)")
    p.add_argument("--format", choices=["csv", "binary"], help="default: inferred from the suffix")

    p = sub.add_parser("estimate", help="estimate variance along the slow variable")
    p.add_argument("--estimator", choices=ESTIMATORS, required=True)
    p.add_argument("--input", help="ensemble file (CSV or binary); not used by m4")
    p.add_argument("--window", type=int, help="window length in records (m1, m2-*)")
    _preset_args(p, required=False)
    p.add_argument("--y-values", type=float, nargs="+", help="frozen slow values (m4)")
    p.add_argument("--t-end", type=float, default=200.0, help="fast-time horizon (m4)")
    p.add_argument("--dt-fast", type=float, default=0.01, help="fast-time step (m4)")
    p.add_argument("--replicates", type=int, default=4, help="independent runs per y (m4)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="variance CSV")

    p = sub.add_parser("fit", help="fit scaling laws to a variance CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--law", action="append", choices=[l.value for l in Law],
                   help="repeatable; default: all reciprocal laws")
    p.add_argument("--component", type=int, default=0, help="fast component whose variance is fitted")
    p.add_argument("--coord", type=int, default=0, help="slow coordinate used as the abscissa")
    p.add_argument("--y-min", type=float)
    p.add_argument("--y-max", type=float)
    p.add_argument("--out", help="fit JSON (default: stdout only)")

    p = sub.add_parser("scaling", help="log-log slopes of closed-form covariance entries")
    p.add_argument("--kind", required=True, choices=[k.value for k in Kind])
    p.add_argument("--aux", type=_kv, action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--noise", choices=["identity", "multiplicative"], default="identity",
                   help="multiplicative: N = |y1| diag(1, 2, 3, ...), noise vanishing at the bifurcation")
    p.add_argument("--t-min", type=float, default=1e-6)
    p.add_argument("--t-max", type=float, default=1e-3)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--coord", type=int, default=0, help="slow coordinate used as the abscissa")

    p = sub.add_parser("model", help="list presets or dump their analytics")
    _preset_args(p, required=False)
    p.add_argument("--list", action="store_true")
    p.add_argument("--sweep", type=int, metavar="N", help="equilibrium sweep with N points along the default path")
    p.add_argument("--out", help="CSV for the sweep")

    p = sub.add_parser("run", help="simulate -> estimate -> fit with a manifest")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--spec", help="experiment JSON")
    src.add_argument("--manifest", help="manifest JSON of an earlier run; re-run and compare hashes")
    _preset_args(p, required=False)
    _sim_args(p)
    p.add_argument("--estimator", choices=ESTIMATORS)
    p.add_argument("--window", type=int)
    p.add_argument("--fit", action="append", choices=[l.value for l in Law], help="repeatable")
    p.add_argument("--component", type=int)
    p.add_argument("--y-min", type=float)
    p.add_argument("--y-max", type=float)
    p.add_argument("--out-dir")
    p.add_argument("--ensemble-format", choices=["csv", "binary", "none"])

    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--json", action="store_true", help="print the table as JSON")
    return ap


# ---------------------------------------------------------------------------

def cmd_classify(args, out) -> int:
    kind = Kind(args.kind)
    aux = {k: getattr(args, k) for k in ("s", "l1", "l2", "theta0") if getattr(args, k) is not None}
    e = entry(kind, **aux)
    if len(args.g) != e.n:
        raise SpecError(f"{kind.value} has {e.n} slow variable(s); got {len(args.g)} --g value(s)")
    verdict, rule = explain_transition(e, SlowFlowData(tuple(args.g), args.dg2_dy2, args.j2))
    if args.json:
        out.write(dumps({"kind": kind.value, "verdict": verdict.value, "rule": rule}))
    else:
        out.write(f"{verdict.value}  [{rule}]\n")
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    spec = _preset_spec(args)
    preset = build_preset(spec)
    d = preset.defaults
    sim = {"dt": d["dt"], "s_end": d["s_end"], "record_stride": d.get("stride", 1), "n_paths": 1,
           "allow_coarse": False, "workers": 1}
    sim.update(_sim_spec(args))
    ens = simulate_preset(preset, sim, args.seed or 0)
    fmt_ = args.format or ("binary" if args.out.endswith(".bin") else "csv")
    (write_binary if fmt_ == "binary" else write_csv)(ens, args.out)
    out.write(dumps({"preset": preset.id, "paths": ens.n_paths, "records": len(ens.s),
                     "blowups": int(ens.blowup.sum()), "clamp_events": int(ens.clamp_events.sum()),
                     "out": args.out}))
    return EXIT_OK


def cmd_estimate(args, out) -> int:
    preset = build_preset(_preset_spec(args)) if args.preset else None
    est = {"kind": args.estimator}
    ens = None
    if args.estimator == "m4":
        if preset is None:
            raise SpecError("m4 needs --preset")
        if not args.y_values:
            raise SpecError("m4 needs --y-values")
        est.update(y_values=args.y_values, t_end=args.t_end, dt_fast=args.dt_fast,
                   replicates=args.replicates, burn_in=0.2 * args.t_end)
    else:
        if not args.input:
            raise SpecError(f"{args.estimator} needs --input")
        ens = read_ensemble(args.input)
        if args.estimator != "m3":
            if args.window is None:
                raise SpecError(f"{args.estimator} needs --window")
            est["window"] = args.window
    series = estimate(est, preset, ens, args.seed)
    write_variance_csv(series, args.out)
    out.write(dumps({"method": series.method, "points": len(series), "out": args.out}))
    return EXIT_OK


def cmd_fit(args, out) -> int:
    series = read_variance_csv(args.input)
    laws = args.law or [l.value for l in Law if l is not Law.LINEAR]
    lo = -np.inf if args.y_min is None else args.y_min
    hi = np.inf if args.y_max is None else args.y_max
    if args.component >= series.m:
        raise SpecError(f"component {args.component} out of range (m={series.m})")
    res = fit_series(series, laws, args.component, (lo, hi), args.coord)
    res["y_range"] = [None if not np.isfinite(v) else v for v in (lo, hi)]
    if args.out:
        write_json(res, args.out)
    out.write(dumps(res))
    return EXIT_OK


def _loglog_slope(t, v) -> float:
    v = np.abs(v)
    if np.all(v == 0):
        return 0.0
    return float(np.polyfit(np.log(t), np.log(v), 1)[0])


def cmd_scaling(args, out) -> int:
    e = entry(Kind(args.kind), **dict(args.aux))
    if args.coord >= e.n:
        raise SpecError(f"{e.kind.value} has {e.n} slow variable(s)")
    ts = np.logspace(np.log10(args.t_min), np.log10(args.t_max), args.points)
    ys = np.array([attracting_sample(e, float(t)) for t in ts])

    def noise(y):
        if args.noise == "multiplicative":
            return abs(y[0]) * np.diag(np.arange(1.0, e.m + 1))
        return np.eye(e.m)

    Xs = np.array([covariance_closed_form(e, y, noise).X for y in ys])
    absc = np.abs(ys[:, args.coord])
    rows = []
    for i in range(e.m):
        for j in range(i, e.m):
            rows.append({"entry": [i + 1, j + 1], "slope": _loglog_slope(absc, Xs[:, i, j]),
                         "max_abs": float(np.max(np.abs(Xs[:, i, j])))})
    out.write(dumps({"kind": e.kind.value, "noise": args.noise, "abscissa": f"|y_{args.coord + 1}|",
                     "entries": rows}))
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items() if not callable(v) and not hasattr(v, "poly")}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def cmd_model(args, out) -> int:
    if args.list or not args.preset:
        rows = []
        for name, fn in sorted(PRESETS.items()):
            rows.append({"name": name, "id": fn().id})
        out.write(dumps({"presets": rows}))
        return EXIT_OK
    preset = build_preset(_preset_spec(args))
    an = preset.analytics
    info = {"id": preset.id, "params": _jsonable(preset.params), "x0": preset.x0.tolist(),
            "y0": preset.y0.tolist(), "defaults": _jsonable(preset.defaults),
            "analytics": _jsonable(an.to_dict()) if hasattr(an, "to_dict") else {}}
    if args.sweep:
        d = preset.defaults
        if "slow_path" in d:
            path = d["slow_path"]
        else:
            g = preset.system.g(preset.x0[None, :], preset.y0[None, :])[0]
            y0, y1 = preset.y0, preset.y0 + g * d["s_end"]

            def path(t):
                return y0 + t * (y1 - y0)
        br = equilibrium_branch_sweep(preset.system, path, args.sweep, preset.x0)
        info["events"] = [{"t": ev.t, "y": np.atleast_1d(ev.y).tolist(), "kind": ev.kind, "imag": ev.imag}
                          for ev in br.detected_events]
        if args.out:
            with open(args.out, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                Y = np.atleast_2d(np.asarray(br.y_grid, float).reshape(len(br.t), -1))
                X = np.asarray(br.x_values, float)
                w.writerow(["t"] + [f"y_{i + 1}" for i in range(Y.shape[1])]
                           + [f"x_{i + 1}" for i in range(X.shape[1])] + ["stability", "max_real"])
                for k in range(len(br.t)):
                    w.writerow([fmt(br.t[k])] + [fmt(v) for v in Y[k]] + [fmt(v) for v in X[k]]
                               + [br.stability[k], fmt(br.max_real[k])])
            info["sweep_csv"] = args.out
    out.write(dumps(info))
    return EXIT_OK


def _run_spec_from_flags(args) -> dict:
    if not args.preset:
        raise SpecError("run needs --spec, --manifest or --preset")
    spec = _preset_spec(args)
    sim = _sim_spec(args)
    if sim:
        spec["sim"] = sim
    if args.seed is not None:
        spec["seed"] = args.seed
    if args.estimator:
        spec["estimator"] = {"kind": args.estimator}
        if args.window is not None:
            spec["estimator"]["window"] = args.window
    elif args.window is not None:
        raise SpecError("--window needs --estimator")
    fit = {}
    if args.fit:
        fit["laws"] = args.fit
    if args.component is not None:
        fit["component"] = args.component
    if (args.y_min is None) != (args.y_max is None):
        raise SpecError("--y-min and --y-max go together")
    if args.y_min is not None:
        fit["y_range"] = [args.y_min, args.y_max]
    if fit:
        spec["fit"] = fit
    o = {}
    if args.out_dir:
        o["dir"] = args.out_dir
    if args.ensemble_format:
        o["ensemble_format"] = args.ensemble_format
    if o:
        spec["output"] = o
    return spec


def cmd_run(args, out) -> int:
    if args.manifest:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        spec = ExperimentSpec.from_dict(manifest["spec"])
        out_dir = args.out_dir or str(Path(args.manifest).parent)
        run_experiment(spec, out_dir)
        bad = check_manifest(manifest, out_dir)
        out.write(dumps({"reproduced": not bad, "mismatched": bad, "out_dir": out_dir}))
        return EXIT_OK if not bad else EXIT_FAIL
    spec = load_spec(args.spec) if args.spec else ExperimentSpec.from_dict(_run_spec_from_flags(args))
    manifest = run_experiment(spec, args.out_dir)
    out_dir = args.out_dir or spec.resolved["output"]["dir"]
    fit = json.loads((Path(out_dir) / "fit.json").read_text(encoding="utf-8"))
    out.write(dumps({"out_dir": out_dir, "files": manifest["files"], "best": fit["best"], "y_c": fit["y_c"],
                     "blowups": manifest["blowups"]}))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    rows = run_suite(args.suite)
    ok = all(r.passed for r in rows)
    if args.json:
        out.write(dumps({"suite": args.suite, "passed": ok, "cases": [r.as_dict() for r in rows]}))
    else:
        for r in rows:
            out.write(f"{'PASS' if r.passed else 'FAIL'}  {r.case}  value={r.value:.6g}  "
                      f"threshold={r.threshold:.6g}  {r.detail}\n")
        out.write(f"{args.suite}: {'all passed' if ok else 'FAILED'}\n")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"classify": cmd_classify, "simulate": cmd_simulate, "estimate": cmd_estimate, "fit": cmd_fit,
            "scaling": cmd_scaling, "model": cmd_model, "run": cmd_run, "verify": cmd_verify}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except SpecError as exc:
        err.write(f"critrans {args.command}: usage error: {exc}\n")
        return EXIT_USAGE
    except (AnalysisError, OSError, ValueError, RuntimeError) as exc:
        err.write(f"critrans {args.command}: error: {exc}\n")
        return EXIT_FAIL
