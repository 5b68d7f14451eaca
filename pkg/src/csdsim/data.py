"""Initial data generators.

Spec strings:

    constant(c1, c2)          spatially constant spinor (complex literals ok)
    planewave((k1, k2), j)    e^{i k.x} in component j (1 or 2)
    eigenmode((k1, k2), +)    e^{i k.x} v with (k/|k|).alpha v = +-v, |v| = 1
    random-hs(s, amp)         Gaussian modes scaled by amp <xi>^{-s-1-delta}

random-hs draws its modes ring by ring (``max(|k1|, |k2|)``), so the modes
shared by two grid sizes get the same coefficients for a given seed. Shell
mass of the H^s norm decays like ``<xi>^{-1-2 delta}``: summable, but only
barely for delta = 0.01.
"""
from __future__ import annotations

import ast
import re

import numpy as np

from .fields import SpinorField, TorusGrid

DELTA = 0.01

_SPEC_RE = re.compile(r"^\s*([a-z][a-z\-]*)\s*\((.*)\)\s*$", re.S)


def _parse(spec: str):
    m = _SPEC_RE.match(spec)
    if not m:
        raise ValueError(f"cannot parse data spec {spec!r}")
    name, body = m.group(1), m.group(2)
    if name == "eigenmode":
        body = re.sub(r",\s*([+-])\s*$", r", '\1'", body)
    try:
        args = ast.literal_eval(f"({body},)")
    except (ValueError, SyntaxError) as exc:
        raise ValueError(f"bad arguments in data spec {spec!r}: {exc}") from None
    return name, args


def eigenvector(k1: float, k2: float, sign: int) -> np.ndarray:
    """Unit v with (w.alpha) v = sign v, w = k/|k| (w = (1, 0) at k = 0)."""
    r = np.hypot(k1, k2)
    w1, w2 = (k1 / r, k2 / r) if r > 0 else (1.0, 0.0)
    return np.array([1.0, sign * (w2 - 1j * w1)], dtype=np.complex128) / np.sqrt(2)


def _ring_order(grid: TorusGrid) -> np.ndarray:
    """Flat indices of the non-Nyquist modes ordered by (ring, k1, k2)."""
    k1, k2 = grid.k
    ring = np.maximum(np.abs(k1), np.abs(k2))
    keep = ~grid.nyquist_mask
    idx = np.flatnonzero(keep)
    order = np.lexsort((k2.ravel()[idx], k1.ravel()[idx], ring.ravel()[idx]))
    return idx[order]


def random_hs(grid: TorusGrid, s: float, amplitude: float, seed: int) -> SpinorField:
    rng = np.random.default_rng(seed)
    idx = _ring_order(grid)
    g = rng.standard_normal((idx.size, 2, 2))
    z = (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2)
    weight = (1.0 + grid.abs_xi.ravel()[idx] ** 2) ** (-(s + 1 + DELTA) / 2)
    c = np.zeros((2, grid.n * grid.n), dtype=np.complex128)
    c[:, idx] = amplitude * (weight[:, None] * z).T
    return SpinorField(grid, c.reshape(2, grid.n, grid.n), "fourier")


def make_initial_data(spec: str, grid: TorusGrid, seed: int = 0) -> SpinorField:
    name, args = _parse(spec)
    x1, x2 = grid.x
    if name == "constant":
        if len(args) != 2:
            raise ValueError("constant takes two components")
        c1, c2 = (complex(a) for a in args)
        data = np.stack([np.full_like(x1, c1, dtype=np.complex128), np.full_like(x1, c2, dtype=np.complex128)])
        return SpinorField(grid, data)
    if name in ("planewave", "eigenmode"):
        if len(args) != 2 or not isinstance(args[0], tuple) or len(args[0]) != 2:
            raise ValueError(f"{name} takes ((k1, k2), arg)")
        k1, k2 = args[0]
        kx = 2 * np.pi / grid.L
        wave = np.exp(1j * kx * (k1 * x1 + k2 * x2))
        if name == "planewave":
            comp = int(args[1])
            if comp not in (1, 2):
                raise ValueError("planewave component must be 1 or 2")
            data = np.zeros((2,) + wave.shape, dtype=np.complex128)
            data[comp - 1] = wave
        else:
            sign = {"+": 1, "-": -1, 1: 1, -1: -1}.get(args[1])
            if sign is None:
                raise ValueError("eigenmode sign must be + or -")
            data = eigenvector(k1, k2, sign)[:, None, None] * wave
        return SpinorField(grid, data)
    if name == "random-hs":
        if len(args) != 2:
            raise ValueError("random-hs takes (s, amplitude)")
        return random_hs(grid, float(args[0]), float(args[1]), seed)
    raise ValueError(f"unknown data spec {name!r}")
