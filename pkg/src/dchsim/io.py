"""On-disk artifact formats: snapshot binary, CSV writers, JSON reports.

All numeric text output uses the shortest round-trip decimal
representation of the underlying 64-bit float (Python's repr), so reruns
are byte-identical and re-parsing is lossless.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

__all__ = [
    "SNAPSHOT_MAGIC",
    "TIMESERIES_COLUMNS",
    "RICCATI_COLUMNS",
    "fmt",
    "write_snapshot",
    "read_snapshot",
    "write_csv",
    "read_csv",
    "write_json",
]

SNAPSHOT_MAGIC = b"DCHSNAP1"
SNAPSHOT_VERSION = 1

TIMESERIES_COLUMNS = (
    "t",
    "dt",
    "energy",
    "min_vx",
    "argmin_vx",
    "max_abs_v",
    "momentum_residual",
    "margin_F",
    "margin_G",
    "margin_P",
    "boundary_contamination",
)

RICCATI_COLUMNS = ("t", "q_x0", "g", "A", "B", "linear_bound_rhs")


def fmt(x) -> str:
    """Shortest round-trip decimal of a float (integers stay integral)."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def write_snapshot(path, half_width: float, d: float, t: float, values) -> None:
    """Binary snapshot: magic, u32 version, u64 N, then f64 L, d, t, data.

    All fixed-width fields little-endian.
    """
    vals = np.asarray(values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<I", SNAPSHOT_VERSION))
        fh.write(struct.pack("<Q", vals.size))
        fh.write(struct.pack("<ddd", float(half_width), float(d), float(t)))
        fh.write(vals.tobytes())


def read_snapshot(path) -> dict:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, not a snapshot file")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != SNAPSHOT_VERSION:
            raise ValueError(f"{path}: unsupported snapshot version {version}")
        (n,) = struct.unpack("<Q", fh.read(8))
        half_width, d, t = struct.unpack("<ddd", fh.read(24))
        data = np.frombuffer(fh.read(8 * n), dtype="<f8")
        if data.size != n:
            raise ValueError(f"{path}: truncated snapshot ({data.size} of {n} values)")
    return {
        "version": version,
        "n_points": int(n),
        "half_width": half_width,
        "d": d,
        "t": t,
        "values": data.astype(np.float64),
    }


def write_csv(path, columns, rows) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    if not text[1:]:
        return header, np.empty((0, len(header)))
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return header, data


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
