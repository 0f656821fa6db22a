"""Experiment files: JSON schema, validation and default resolution."""

from __future__ import annotations

import copy
import inspect
import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from ..model_zoo import PRESETS, ModelPreset, normal_form_preset
from ..normal_forms import Kind
from ..warning_signs import Law

__all__ = ["SCHEMA", "ESTIMATORS", "SpecError", "ExperimentSpec", "load_spec", "build_preset"]

ESTIMATORS = ("m1", "m2-linear", "m2-cm", "m3", "m4")

_NUM = {"type": "number"}
_NUM_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "critrans experiment",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "preset": {"type": "string", "enum": sorted(PRESETS)},
        "params": {"type": "object"},
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": ["normal_form"],
            "properties": {
                "normal_form": {"type": "string", "enum": [k.value for k in Kind]},
                "aux": {"type": "object"},
                "g": {"type": "array", "items": _NUM, "minItems": 1},
                "eps": {"type": "number", "exclusiveMinimum": 0},
                "sigma": {"type": "number", "minimum": 0},
                "y0": {"type": "array", "items": _NUM, "minItems": 1},
                "y_end": _NUM,
                "coord": {"type": "integer", "minimum": 0},
                "noise": {"type": "array", "items": {"type": "array", "items": _NUM}},
            },
        },
        "seed": {"type": "integer", "minimum": 0},
        "sim": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "s_end": {"type": "number", "minimum": 0},
                "record_stride": {"type": "integer", "minimum": 1},
                "n_paths": {"type": "integer", "minimum": 1},
                "allow_coarse": {"type": "boolean"},
                "workers": {"type": "integer", "minimum": 1},
            },
        },
        "estimator": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"type": "string", "enum": list(ESTIMATORS)},
                "window": {"type": "integer", "minimum": 1},
                "y_values": {"type": "array", "items": _NUM, "minItems": 1},
                "t_end": {"type": "number", "exclusiveMinimum": 0},
                "burn_in": {"type": "number", "minimum": 0},
                "dt_fast": {"type": "number", "exclusiveMinimum": 0},
                "replicates": {"type": "integer", "minimum": 1},
            },
        },
        "fit": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "laws": {"type": "array", "items": {"type": "string", "enum": [l.value for l in Law]}},
                "component": {"type": "integer", "minimum": 0},
                "y_range": _NUM_PAIR,
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dir": {"type": "string"},
                "ensemble_format": {"type": "string", "enum": ["csv", "binary", "none"]},
            },
        },
    },
    "oneOf": [{"required": ["preset"], "not": {"required": ["system"]}},
              {"required": ["system"], "not": {"anyOf": [{"required": ["preset"]}, {"required": ["params"]}]}}],
}


class SpecError(ValueError):
    """Invalid experiment file (a usage error)."""


def build_preset(spec: dict) -> ModelPreset:
    if "system" in spec:
        sysd = dict(spec["system"])
        kind = sysd.pop("normal_form")
        try:
            return normal_form_preset(kind, **sysd)
        except (TypeError, ValueError) as exc:
            raise SpecError(f"inline system: {exc}") from exc
    fn = PRESETS[spec["preset"]]
    params = spec.get("params", {})
    allowed = set(inspect.signature(fn).parameters)
    unknown = sorted(set(params) - allowed)
    if unknown:
        raise SpecError(f"unknown parameter(s) for preset {spec['preset']}: {', '.join(unknown)}")
    try:
        return fn(**params)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"preset {spec['preset']}: {exc}") from exc


@dataclass
class ExperimentSpec:
    """A validated experiment with every default filled in."""

    raw: dict
    resolved: dict
    preset: ModelPreset

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        try:
            jsonschema.validate(data, SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise SpecError(f"spec invalid at {where}: {exc.message}") from exc
        preset = build_preset(data)
        return cls(copy.deepcopy(data), _resolve(data, preset), preset)

    def to_json(self) -> str:
        return json.dumps(self.resolved, sort_keys=True, indent=2)


def _resolve(data: dict, preset: ModelPreset) -> dict:
    d = preset.defaults
    out = copy.deepcopy(data)
    out.setdefault("seed", 0)
    sim = out.setdefault("sim", {})
    sim.setdefault("dt", float(d["dt"]))
    sim.setdefault("s_end", float(d["s_end"]))
    sim.setdefault("record_stride", int(d.get("stride", 1)))
    sim.setdefault("n_paths", 100)
    sim.setdefault("allow_coarse", False)
    sim.setdefault("workers", 1)
    est = out.setdefault("estimator", {"kind": d.get("estimator", "m3")})
    if est["kind"] in ("m1", "m2-linear", "m2-cm"):
        est.setdefault("window", int(d.get("window", 100)))
    if est["kind"] == "m4":
        lo, hi = d["fit_range"]
        est.setdefault("y_values", [lo + (hi - lo) * i / 19 for i in range(20)])
        est.setdefault("t_end", 200.0)
        est.setdefault("dt_fast", 0.01)
        est.setdefault("replicates", 4)
        est.setdefault("burn_in", 0.2 * est["t_end"])
        if preset.system.n != 1:
            raise SpecError("m4 scans need a one-dimensional slow variable")
    fit = out.setdefault("fit", {})
    fit.setdefault("laws", list(d.get("laws", ("inv-sqrt",))))
    fit.setdefault("component", int(d.get("component", 0)))
    fit.setdefault("y_range", [float(v) for v in d["fit_range"]])
    if fit["component"] >= preset.system.m:
        raise SpecError(f"fit component {fit['component']} out of range for m={preset.system.m}")
    o = out.setdefault("output", {})
    o.setdefault("dir", "critrans_out")
    o.setdefault("ensemble_format", "csv")
    return out


def load_spec(path) -> ExperimentSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: not valid JSON ({exc})") from exc
    if isinstance(data, dict) and "spec" in data and "files" in data:
        data = data["spec"]       # a run manifest
    return ExperimentSpec.from_dict(data)
