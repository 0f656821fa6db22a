"""Plot-ready CSV and stable JSON artifacts."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from ..sde_engine import MAGIC, PathEnsemble, read_binary, read_csv
from ..series import CovarianceSeries

__all__ = ["write_variance_csv", "read_variance_csv", "write_json", "dumps", "sha256_file",
           "read_ensemble", "fmt"]


def fmt(v: float) -> str:
    v = float(v)
    return "nan" if math.isnan(v) else repr(v)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_variance_csv(series: CovarianceSeries, path) -> None:
    """Columns: y (or y_1..y_n), s when known, then the upper triangle cov_i_j."""
    y = series.y if series.y.ndim == 2 else series.y[:, None]
    n = y.shape[1]
    m = series.m
    pairs = [(i, j) for i in range(m) for j in range(i, m)]
    header = ["y"] if n == 1 else [f"y_{i + 1}" for i in range(n)]
    if series.s is not None:
        header.append("s")
    header += [f"cov_{i + 1}_{j + 1}" for i, j in pairs]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for g in range(len(series)):
            row = [fmt(v) for v in y[g]]
            if series.s is not None:
                row.append(fmt(series.s[g]))
            row += [fmt(series.cov[g, i, j]) for i, j in pairs]
            w.writerow(row)


def read_variance_csv(path, method: str = "M3") -> CovarianceSeries:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body]) if body else np.empty((0, len(header)))
    ycols = [i for i, h in enumerate(header) if h == "y" or h.startswith("y_")]
    ccols = [(i, h) for i, h in enumerate(header) if h.startswith("cov_")]
    if not ycols or not ccols:
        raise ValueError(f"{path}: missing y or cov columns")
    m = max(int(h.split("_")[2]) for _, h in ccols)
    cov = np.zeros((len(data), m, m))
    for col, h in ccols:
        i, j = int(h.split("_")[1]) - 1, int(h.split("_")[2]) - 1
        cov[:, i, j] = cov[:, j, i] = data[:, col]
    y = data[:, ycols[0]] if len(ycols) == 1 else data[:, ycols]
    s = data[:, header.index("s")] if "s" in header else None
    return CovarianceSeries(y, cov, method, s=s)


def read_ensemble(path) -> PathEnsemble:
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
    return read_binary(path) if head == MAGIC else read_csv(path)
