"""Plain-text curve and driving-function files.

Curve v1::

    # curve v1 model=lerw N=10000 lambda=1 seed=42
    0 0
    0 0.00063...

Driving v1::

    # driving v1 steps=1873 T=0.0184 ...
    t u

Numbers are written with 17 significant digits so files round-trip exactly.
"""
from __future__ import annotations

import shlex
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .zipper import Curve

FMT = "%.17g"


def _header(kind: str, meta: dict) -> str:
    fields = " ".join(f"{k}={v}" for k, v in meta.items())
    return f"# {kind} v1" + (f" {fields}" if fields else "")


def _parse_header(line: str, kind: str) -> dict:
    parts = shlex.split(line.lstrip("#").strip())
    if len(parts) < 2 or parts[0] != kind or parts[1] != "v1":
        raise ValidationError(f"not a '{kind} v1' file: {line.strip()!r}")
    meta = {}
    for item in parts[2:]:
        if "=" not in item:
            raise ValidationError(f"bad header field {item!r}")
        k, v = item.split("=", 1)
        meta[k] = v
    return meta


def _read(path, kind):
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
        meta = _parse_header(first, kind)
        try:
            data = np.loadtxt(fh, ndmin=2)
        except ValueError as exc:
            raise ValidationError(f"{path}: {exc}") from exc
    if data.shape[1] != 2:
        raise ValidationError(f"{path}: expected two columns")
    return meta, data


def write_curve(path, curve: Curve, **meta) -> None:
    pts = curve.points
    np.savetxt(path, np.column_stack([pts.real, pts.imag]), fmt=FMT, header=_header("curve", meta)[2:], comments="# ")


def read_curve(path):
    meta, data = _read(path, "curve")
    return Curve(data[:, 0] + 1j * data[:, 1]), meta


def write_driving(path, t, u, **meta) -> None:
    np.savetxt(path, np.column_stack([t, u]), fmt=FMT, header=_header("driving", meta)[2:], comments="# ")


def read_driving(path):
    meta, data = _read(path, "driving")
    return data[:, 0], data[:, 1], meta


# unit steps of a square-lattice walk, coded 0..3
_STEPS = np.array([[0, 1], [0, -1], [-1, 0], [1, 0]])


def save_walk_codes(path, x, y, **meta) -> None:
    """Store a nearest-neighbour walk from the origin as 2-bit step codes."""
    d = np.column_stack([np.diff(x), np.diff(y)])
    codes = np.full(len(d), 255, dtype=np.uint8)
    for c, s in enumerate(_STEPS):
        codes[(d == s).all(axis=1)] = c
    if np.any(codes == 255) or x[0] != 0 or y[0] != 0:
        raise ValidationError("not a nearest-neighbour walk from the origin")
    np.savez_compressed(path, codes=codes, **{k: np.asarray(v) for k, v in meta.items()})


def load_walk_codes(path):
    with np.load(path) as f:
        codes = f["codes"]
        meta = {k: f[k].item() for k in f.files if k != "codes"}
    steps = _STEPS[codes]
    xy = np.vstack([[0, 0], np.cumsum(steps, axis=0)])
    return xy[:, 0], xy[:, 1], meta
