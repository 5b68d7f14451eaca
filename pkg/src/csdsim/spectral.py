"""Fourier multipliers, Dirac matrices and half-wave projections on the torus."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import SpinorField, TorusGrid

GAMMA0 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
GAMMA1 = np.array([[0, 1j], [1j, 0]], dtype=np.complex128)
GAMMA2 = np.array([[0, 1], [-1, 0]], dtype=np.complex128)
IDENTITY = np.eye(2, dtype=np.complex128)


@dataclass(frozen=True)
class DiracMatrices:
    gamma0: np.ndarray = GAMMA0
    gamma1: np.ndarray = GAMMA1
    gamma2: np.ndarray = GAMMA2

    @property
    def alpha0(self):
        return IDENTITY

    @property
    def alpha1(self):
        return self.gamma0 @ self.gamma1

    @property
    def alpha2(self):
        return self.gamma0 @ self.gamma2

    @property
    def beta(self):
        return self.gamma0

    def alpha(self, mu: int) -> np.ndarray:
        return (self.alpha0, self.alpha1, self.alpha2)[mu]


DIRAC = DiracMatrices()
ALPHA1 = DIRAC.alpha1
ALPHA2 = DIRAC.alpha2
BETA = DIRAC.beta


class ConsistencyError(RuntimeError):
    """Two evaluation routes of the same quantity disagree."""


@dataclass(frozen=True)
class MultiplierSymbol:
    """Values of a Fourier multiplier on the grid lattice.

    ``values`` has shape ``(n, n)`` (scalar symbol) or ``(n, n, 2, 2)``
    (matrix symbol). The zero mode is overwritten with ``zero_mode`` so it
    never comes from a division by ``|xi| = 0``.
    """

    grid: TorusGrid
    values: np.ndarray
    zero_mode: complex | np.ndarray = 0.0

    def __post_init__(self):
        n = self.grid.n
        v = np.array(self.values, dtype=np.complex128, copy=True)
        if v.shape not in ((n, n), (n, n, 2, 2)):
            raise ValueError(f"symbol shape {v.shape} does not fit an {n}x{n} lattice")
        v[0, 0] = self.zero_mode
        if not np.all(np.isfinite(v)):
            raise ValueError("symbol has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def is_matrix(self) -> bool:
        return self.values.ndim == 4


def _safe_inverse(a):
    out = np.zeros_like(a, dtype=np.float64)
    np.divide(1.0, a, out=out, where=a != 0)
    return out


def identity_symbol(grid: TorusGrid) -> MultiplierSymbol:
    return MultiplierSymbol(grid, np.ones((grid.n, grid.n)), 1.0)


def bracket_symbol(grid: TorusGrid, s: float) -> MultiplierSymbol:
    """<xi>^s = (1 + |xi|^2)^(s/2)."""
    return MultiplierSymbol(grid, (1.0 + grid.abs_xi**2) ** (s / 2), 1.0)


def abs_symbol(grid: TorusGrid) -> MultiplierSymbol:
    """|D|."""
    return MultiplierSymbol(grid, grid.abs_xi, 0.0)


def inverse_laplacian_derivative_symbol(grid: TorusGrid, j: int) -> MultiplierSymbol:
    """Delta^{-1} d_j  <->  -i xi_j / |xi|^2; axis ``j`` is 1 or 2."""
    if j not in (1, 2):
        raise ValueError(f"axis index must be 1 or 2, got {j}")
    xi_j = grid.xi[j - 1]
    vals = -1j * xi_j * _safe_inverse(grid.abs_xi**2)
    vals[grid.nyquist_mask] = 0
    return MultiplierSymbol(grid, vals, 0.0)


def derivative_symbol(grid: TorusGrid, j: int) -> MultiplierSymbol:
    """d_j  <->  i xi_j, Nyquist zeroed."""
    vals = 1j * grid.xi[j - 1]
    vals[grid.nyquist_mask] = 0
    return MultiplierSymbol(grid, vals, 0.0)


def dirac_symbol(grid: TorusGrid) -> MultiplierSymbol:
    """-i alpha . grad  <->  xi1 alpha1 + xi2 alpha2."""
    xi1, xi2 = grid.xi
    vals = xi1[..., None, None] * ALPHA1 + xi2[..., None, None] * ALPHA2
    return MultiplierSymbol(grid, vals, np.zeros((2, 2)))


def projection_symbol(grid: TorusGrid, sign: int) -> MultiplierSymbol:
    """Pi_sign(xi) = (I + sign * xi/|xi| . alpha) / 2; Pi(0) uses direction (1, 0)."""
    sign = _check_sign(sign)
    xi1, xi2 = grid.xi
    inv = _safe_inverse(grid.abs_xi)
    unit = (xi1 * inv)[..., None, None] * ALPHA1 + (xi2 * inv)[..., None, None] * ALPHA2
    vals = 0.5 * (IDENTITY + sign * unit)
    return MultiplierSymbol(grid, vals, 0.5 * (IDENTITY + sign * ALPHA1))


def _check_sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def apply_symbol_to_coefficients(values: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Mode-by-mode action on coefficient arrays ``(..., n, n)`` or ``(..., 2, n, n)``."""
    if values.ndim == 2:
        return values * c
    return np.einsum("xyij,...jxy->...ixy", values, c)


def apply_multiplier(f, symbol: MultiplierSymbol):
    """Apply ``symbol`` to a SpinorField or to a scalar array ``(..., n, n)``.

    Spinor input keeps its representation. Scalar input is taken as physical
    values and the physical result is returned (complex dtype).
    """
    grid = symbol.grid
    if isinstance(f, SpinorField):
        if f.grid != grid:
            raise ValueError(f"grid mismatch: field on {f.grid}, symbol on {grid}")
        c = apply_symbol_to_coefficients(symbol.values, f.coefficients)
        return SpinorField(grid, c, "fourier").in_space(f.space)
    f = np.asarray(f)
    if f.shape[-2:] != (grid.n, grid.n):
        raise ValueError(f"scalar field of shape {f.shape} does not fit an {grid.n}x{grid.n} grid")
    if symbol.is_matrix:
        raise ValueError("matrix symbols act on spinor fields only")
    return grid.ifft(symbol.values * grid.fft(f))


def inverse_laplacian_derivative(f, grid: TorusGrid, j: int, tol: float = 1e-13):
    """Delta^{-1} d_j of a real scalar field; the zero mode maps to zero."""
    out = apply_multiplier(f, inverse_laplacian_derivative_symbol(grid, j))
    if np.isrealobj(f):
        scale = max(1.0, float(np.max(np.abs(out), initial=0.0)))
        if np.max(np.abs(out.imag), initial=0.0) > tol * scale:
            raise ConsistencyError("inverse Laplacian derivative of a real field came out complex")
        return out.real
    return out


def half_wave_projection(psi: SpinorField, sign) -> SpinorField:
    return apply_multiplier(psi, projection_symbol(psi.grid, sign))


def dirac_derivative(psi: SpinorField, rtol: float = 1e-12) -> SpinorField:
    """-i alpha^j d_j psi, cross-checked against |D| Pi_+ - |D| Pi_-."""
    grid = psi.grid
    c = psi.coefficients
    direct = apply_symbol_to_coefficients(dirac_symbol(grid).values, c)
    absd = abs_symbol(grid).values
    plus = apply_symbol_to_coefficients(projection_symbol(grid, 1).values, c)
    minus = apply_symbol_to_coefficients(projection_symbol(grid, -1).values, c)
    split = absd * plus - absd * minus
    gap = np.linalg.norm(direct - split)
    ref = np.sqrt(np.sum((1 + grid.abs_xi**2) * np.sum(np.abs(c) ** 2, axis=0)))
    if gap > rtol * max(ref, np.finfo(float).tiny):
        raise ConsistencyError(f"Dirac operator routes disagree: {gap:.3e} vs H1 norm {ref:.3e}")
    return SpinorField(grid, direct, "fourier").in_space(psi.space)


def sobolev_norm(f, s: float, homogeneous: bool = False, grid: TorusGrid | None = None) -> float:
    """H^s (or homogeneous H^s) norm; for s = 0 it equals the physical L^2 norm.

    ``||f||^2 = L^2 * sum_k w(xi_k) |c_k|^2`` with ``w = <xi>^{2s}`` or
    ``|xi|^{2s}`` (zero mode dropped). Spinor norms sum both components.
    """
    if isinstance(f, SpinorField):
        grid = f.grid
        power = np.sum(np.abs(f.coefficients) ** 2, axis=0)
    else:
        if grid is None:
            raise ValueError("scalar fields need an explicit grid")
        power = np.abs(grid.fft(np.asarray(f))) ** 2
    if homogeneous:
        w = np.zeros_like(grid.abs_xi)
        nz = grid.abs_xi > 0
        w[nz] = grid.abs_xi[nz] ** (2 * s)
    else:
        w = (1.0 + grid.abs_xi**2) ** s
    return float(grid.L * np.sqrt(np.sum(w * power)))


def dealias(f, grid: TorusGrid | None = None):
    """Zero every mode with max(|k1|, |k2|) > n/4."""
    if isinstance(f, SpinorField):
        c = f.coefficients * f.grid.dealias_mask
        return SpinorField(f.grid, c, "fourier").in_space(f.space)
    if grid is None:
        raise ValueError("scalar fields need an explicit grid")
    f = np.asarray(f)
    out = grid.ifft(grid.fft(f) * grid.dealias_mask)
    return out.real if np.isrealobj(f) else out
