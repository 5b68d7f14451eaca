"""Torus grid, spinor fields and trajectories.

Conventions
-----------
* Arrays use numpy FFT ordering. Integer wavenumbers run over
  ``-n/2 .. n/2-1``; the ``-n/2`` entry is the Nyquist mode and is kept at
  zero on every field built here.
* The forward transform carries ``1/n**2`` so Fourier arrays hold Fourier
  coefficients: ``f(x) = sum_k c_k exp(i xi_k . x)`` with ``xi = 2*pi*k/L``.
* A spinor array has shape ``(2, n, n)``; axis 0 is the component.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class TorusGrid:
    n: int
    L: float = 2 * np.pi

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise ValueError(f"n must be a positive even integer, got {self.n}")
        if not self.L > 0:
            raise ValueError(f"extent must be positive, got {self.L}")

    @property
    def dx(self) -> float:
        return self.L / self.n

    @property
    def cell_area(self) -> float:
        return self.dx**2

    @cached_property
    def x(self):
        """Physical coordinates, each of shape (n, n), ``indexing='ij'``."""
        x1 = np.arange(self.n) * self.dx
        return np.meshgrid(x1, x1, indexing="ij")

    @cached_property
    def k(self):
        """Integer wavenumbers (k1, k2), each (n, n) int arrays."""
        k1 = np.rint(np.fft.fftfreq(self.n) * self.n).astype(np.int64)
        return np.meshgrid(k1, k1, indexing="ij")

    @cached_property
    def xi(self):
        """Physical frequencies (xi1, xi2) = 2*pi*k/L."""
        scale = 2 * np.pi / self.L
        k1, k2 = self.k
        return scale * k1, scale * k2

    @cached_property
    def abs_xi(self):
        xi1, xi2 = self.xi
        return np.hypot(xi1, xi2)

    @cached_property
    def nyquist_mask(self):
        """True on the Nyquist row and column."""
        k1, k2 = self.k
        half = self.n // 2
        return (np.abs(k1) == half) | (np.abs(k2) == half)

    @cached_property
    def dealias_mask(self):
        """True on modes kept by the 1/2 rule: max(|k1|, |k2|) <= n/4."""
        k1, k2 = self.k
        return np.maximum(np.abs(k1), np.abs(k2)) <= self.n // 4

    def fft(self, f):
        return np.fft.fft2(f, axes=(-2, -1)) / self.n**2

    def ifft(self, c):
        return np.fft.ifft2(c, axes=(-2, -1)) * self.n**2

    def zero_nyquist(self, c):
        c = np.array(c, dtype=np.complex128, copy=True)
        c[..., self.nyquist_mask] = 0
        return c


@dataclass(frozen=True)
class SpinorField:
    """A C^2-valued field on a torus grid.

    ``space`` tags the representation of ``data``: ``"physical"`` (grid
    values) or ``"fourier"`` (coefficients). The Nyquist row and column are
    zeroed on construction.
    """

    grid: TorusGrid
    data: np.ndarray
    space: str = "physical"

    def __post_init__(self):
        n = self.grid.n
        data = np.asarray(self.data, dtype=np.complex128)
        if data.shape != (2, n, n):
            raise ValueError(f"spinor data must have shape (2, {n}, {n}), got {data.shape}")
        if self.space not in ("physical", "fourier"):
            raise ValueError(f"unknown representation {self.space!r}")
        if self.space == "fourier":
            data = self.grid.zero_nyquist(data)
        else:
            c = self.grid.fft(data)
            if np.any(c[:, self.grid.nyquist_mask] != 0):
                data = self.grid.ifft(self.grid.zero_nyquist(c))
            else:
                data = data.copy()
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "SpinorField":
        return cls(grid, np.zeros((2, grid.n, grid.n), dtype=np.complex128))

    def to_fourier(self) -> "SpinorField":
        if self.space == "fourier":
            return self
        return SpinorField(self.grid, self.grid.fft(self.data), "fourier")

    def to_physical(self) -> "SpinorField":
        if self.space == "physical":
            return self
        return SpinorField(self.grid, self.grid.ifft(self.data), "physical")

    def in_space(self, space: str) -> "SpinorField":
        return self.to_fourier() if space == "fourier" else self.to_physical()

    @property
    def physical(self) -> np.ndarray:
        return self.to_physical().data

    @property
    def coefficients(self) -> np.ndarray:
        return self.to_fourier().data

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.physical) ** 2) * self.grid.cell_area))

    def __add__(self, other: "SpinorField") -> "SpinorField":
        _check_same_grid(self.grid, other.grid)
        return SpinorField(self.grid, self.data + other.in_space(self.space).data, self.space)

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        _check_same_grid(self.grid, other.grid)
        return SpinorField(self.grid, self.data - other.in_space(self.space).data, self.space)

    def __mul__(self, c) -> "SpinorField":
        return SpinorField(self.grid, self.data * c, self.space)

    __rmul__ = __mul__


def _check_same_grid(a: TorusGrid, b: TorusGrid):
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


@dataclass
class Trajectory:
    """Uniformly sampled spinor fields ``psi(t_j)``, ``t_j = j*dt``.

    ``frames`` holds physical values with shape ``(F, 2, n, n)``. The last
    frame sits at ``t = T``; space-time transforms treat ``frames[:-1]``
    as one period of a ``T``-periodic signal.
    """

    grid: TorusGrid
    frames: np.ndarray
    dt: float
    mass: float = 0.0
    sign_convention: int = 1
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.complex128)
        n = self.grid.n
        if self.frames.ndim != 4 or self.frames.shape[1:] != (2, n, n):
            raise ValueError(f"frames must have shape (F, 2, {n}, {n}), got {self.frames.shape}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")

    @classmethod
    def from_fields(cls, fields, dt, **kw) -> "Trajectory":
        fields = list(fields)
        grid = fields[0].grid
        for f in fields:
            _check_same_grid(grid, f.grid)
        return cls(grid, np.stack([f.physical for f in fields]), dt, **kw)

    def __len__(self):
        return self.frames.shape[0]

    @property
    def T(self) -> float:
        return self.dt * (len(self) - 1)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self))

    def frame(self, j: int) -> SpinorField:
        return SpinorField(self.grid, self.frames[j])

    def periodic_samples(self) -> np.ndarray:
        return self.frames[:-1]
