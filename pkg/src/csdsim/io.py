"""Trajectory files, atomic writes and config hashing.

Trajectory file layout::

    CSDTRAJ1\\n
    n=<int> L=<repr> dt=<repr> frames=<int> m=<repr> sign_convention=<+-1>
        endian=little config_hash=<hex> seed=<int> config=<base64 json>\\n
    payload: frames x 2 x n x n complex128, little endian, row major

The header carries no timestamp, so identical runs give identical bytes.
"""
from __future__ import annotations

import base64
import contextlib
import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .fields import TorusGrid, Trajectory

MAGIC = b"CSDTRAJ1"
_DTYPE = np.dtype("<c16")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_json_default)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]


@contextlib.contextmanager
def atomic_open(path, mode="wb"):
    """Write to a temp file in the target directory, rename on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, mode) as fh:
            yield fh
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def write_json(path, obj):
    with atomic_open(path, "w") as fh:
        fh.write(json.dumps(obj, indent=2, sort_keys=True, default=_json_default))
        fh.write("\n")


def write_csv(path, rows: list[dict], fieldnames=None):
    fieldnames = fieldnames or (list(rows[0]) if rows else [])
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    with atomic_open(path, "w") as fh:
        fh.write(buf.getvalue())


def _header(traj: Trajectory, config: dict | None, seed: int) -> bytes:
    config = config or {}
    fields = {
        "n": traj.grid.n,
        "L": repr(float(traj.grid.L)),
        "dt": repr(float(traj.dt)),
        "frames": len(traj),
        "m": repr(float(traj.mass)),
        "sign_convention": int(traj.sign_convention),
        "endian": "little",
        "config_hash": config_hash(config),
        "seed": int(seed),
        "config": base64.b64encode(canonical_json(config).encode()).decode(),
    }
    return (" ".join(f"{k}={v}" for k, v in fields.items()) + "\n").encode()


def write_trajectory(path, traj: Trajectory, config: dict | None = None, seed: int = 0):
    frames = np.ascontiguousarray(traj.frames, dtype=_DTYPE)
    with atomic_open(path, "wb") as fh:
        fh.write(MAGIC + b"\n")
        fh.write(_header(traj, config, seed))
        fh.write(frames.tobytes(order="C"))


class TrajectoryFileError(ValueError):
    pass


def read_header(fh) -> dict:
    if fh.readline().rstrip(b"\n") != MAGIC:
        raise TrajectoryFileError("bad magic; not a CSDTRAJ1 file")
    line = fh.readline().decode().strip()
    try:
        h = dict(item.split("=", 1) for item in line.split())
    except ValueError:
        raise TrajectoryFileError(f"malformed header line: {line[:80]!r}") from None
    for key in ("n", "L", "dt", "frames", "m", "sign_convention", "endian"):
        if key not in h:
            raise TrajectoryFileError(f"header lacks {key!r}")
    if h["endian"] != "little":
        raise TrajectoryFileError(f"unsupported endianness {h['endian']!r}")
    out = {
        "n": int(h["n"]),
        "L": float(h["L"]),
        "dt": float(h["dt"]),
        "frames": int(h["frames"]),
        "m": float(h["m"]),
        "sign_convention": int(h["sign_convention"]),
        "config_hash": h.get("config_hash"),
        "seed": int(h.get("seed", 0)),
        "config": json.loads(base64.b64decode(h["config"])) if "config" in h else {},
    }
    return out


def read_trajectory(path) -> tuple[Trajectory, dict]:
    with open(path, "rb") as fh:
        h = read_header(fh)
        payload = fh.read()
    n, F = h["n"], h["frames"]
    expected = F * 2 * n * n * _DTYPE.itemsize
    if len(payload) != expected:
        raise TrajectoryFileError(f"payload is {len(payload)} bytes, expected {expected}")
    frames = np.frombuffer(payload, dtype=_DTYPE).reshape(F, 2, n, n).astype(np.complex128)
    if h["config"] and config_hash(h["config"]) != h["config_hash"]:
        raise TrajectoryFileError("embedded config does not match its hash")
    traj = Trajectory(TorusGrid(n, h["L"]), frames, h["dt"], mass=h["m"], sign_convention=h["sign_convention"],
                      metadata={"seed": h["seed"], "config_hash": h["config_hash"]})
    return traj, h
