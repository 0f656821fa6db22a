"""CSV and binary serialization of path ensembles.

Binary layout (little-endian throughout)::

    magic      6 bytes  b"FSSDE1"
    header     <IIIIqd  n_paths, n_records, m, n, master_seed, dt
    s          float64[n_records]
    y          float64[n_paths, n_records, n]
    x          float64[n_paths, n_records, m]
    path_index int64[n_paths]
    clamps     int64[n_paths]
    blowup     uint8[n_paths]
    blow_step  int64[n_paths]   (-1 when the path stayed finite)
"""

from __future__ import annotations

import csv
import io
import struct
from pathlib import Path as FsPath
from typing import Union

import numpy as np

from .engine import Path, PathEnsemble

__all__ = ["MAGIC", "write_csv", "read_csv", "write_binary", "read_binary", "to_ensemble"]

MAGIC = b"FSSDE1"
_HEADER = struct.Struct("<IIIIqd")


def to_ensemble(obj: Union[Path, PathEnsemble]) -> PathEnsemble:
    if isinstance(obj, PathEnsemble):
        return obj
    return PathEnsemble(obj.s, obj.y[None], obj.x[None], np.array([obj.path_index], dtype=np.int64),
                        obj.master_seed, np.array([obj.clamp_events], dtype=np.int64),
                        np.array([obj.blowup]),
                        np.array([-1 if obj.blowup_step is None else obj.blowup_step], dtype=np.int64))


def write_csv(obj: Union[Path, PathEnsemble], target) -> None:
    """One row per (path, record): s, y_1..y_n, x_1..x_m, path_id."""
    ens = to_ensemble(obj)
    R, G, m = ens.x.shape
    n = ens.y.shape[2]
    header = ["s"] + [f"y_{i + 1}" for i in range(n)] + [f"x_{i + 1}" for i in range(m)] + ["path_id"]
    own = isinstance(target, (str, FsPath))
    fh = open(target, "w", newline="", encoding="utf-8") if own else target
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in range(R):
            pid = int(ens.path_indices[r])
            for g in range(G):
                row = [repr(float(ens.s[g]))]
                row += [repr(float(v)) for v in ens.y[r, g]]
                row += [repr(float(v)) for v in ens.x[r, g]]
                row.append(str(pid))
                w.writerow(row)
    finally:
        if own:
            fh.close()


def read_csv(source) -> PathEnsemble:
    own = isinstance(source, (str, FsPath))
    fh = open(source, newline="", encoding="utf-8") if own else source
    try:
        rows = list(csv.reader(fh))
    finally:
        if own:
            fh.close()
    header, body = rows[0], rows[1:]
    if header[0] != "s":
        raise ValueError("CSV must start with an 's' column")
    ycol = [i for i, h in enumerate(header) if h.startswith("y_")]
    xcol = [i for i, h in enumerate(header) if h.startswith("x_")]
    has_pid = header[-1] == "path_id"
    data = np.array([[float(v) for v in row[:len(header) - has_pid]] for row in body])
    pids = np.array([int(row[-1]) for row in body]) if has_pid else np.zeros(len(body), dtype=int)
    order = list(dict.fromkeys(pids.tolist()))
    R = len(order)
    G = len(body) // R
    s = data[:G, 0]
    y = np.empty((R, G, len(ycol)))
    x = np.empty((R, G, len(xcol)))
    for r, pid in enumerate(order):
        block = data[pids == pid]
        if len(block) != G:
            raise ValueError("paths in the CSV have unequal lengths")
        y[r] = block[:, ycol]
        x[r] = block[:, xcol]
    blow = ~np.isfinite(x).all(axis=(1, 2))
    return PathEnsemble(s, y, x, np.array(order, dtype=np.int64), 0, np.zeros(R, dtype=np.int64),
                        blow, np.full(R, -1, dtype=np.int64))


def write_binary(obj: Union[Path, PathEnsemble], target) -> None:
    ens = to_ensemble(obj)
    R, G, m = ens.x.shape
    n = ens.y.shape[2]
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(_HEADER.pack(R, G, m, n, int(ens.master_seed), float(ens.dt)))
    buf.write(np.ascontiguousarray(ens.s, dtype="<f8").tobytes())
    buf.write(np.ascontiguousarray(ens.y, dtype="<f8").tobytes())
    buf.write(np.ascontiguousarray(ens.x, dtype="<f8").tobytes())
    buf.write(np.ascontiguousarray(ens.path_indices, dtype="<i8").tobytes())
    buf.write(np.ascontiguousarray(ens.clamp_events, dtype="<i8").tobytes())
    buf.write(np.ascontiguousarray(ens.blowup, dtype="u1").tobytes())
    buf.write(np.ascontiguousarray(ens.blowup_step, dtype="<i8").tobytes())
    data = buf.getvalue()
    if isinstance(target, (str, FsPath)):
        with open(target, "wb") as fh:
            fh.write(data)
    else:
        target.write(data)


def read_binary(source) -> PathEnsemble:
    if isinstance(source, (str, FsPath)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if data[:6] != MAGIC:
        raise ValueError("not an FSSDE1 file")
    R, G, m, n, seed, dt = _HEADER.unpack_from(data, 6)
    off = 6 + _HEADER.size

    def take(count, dtype):
        nonlocal off
        size = np.dtype(dtype).itemsize * count
        arr = np.frombuffer(data, dtype=dtype, count=count, offset=off).copy()
        off += size
        return arr

    s = take(G, "<f8")
    y = take(R * G * n, "<f8").reshape(R, G, n)
    x = take(R * G * m, "<f8").reshape(R, G, m)
    pidx = take(R, "<i8")
    clamps = take(R, "<i8")
    blow = take(R, "u1").astype(bool)
    bstep = take(R, "<i8")
    if off != len(data):
        raise ValueError("trailing bytes in FSSDE1 file")
    return PathEnsemble(s, y, x, pidx, int(seed), clamps, blow, bstep, float(dt))
