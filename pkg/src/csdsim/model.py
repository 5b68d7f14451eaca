"""Chern-Simons-Dirac specifics in Coulomb gauge.

Index conventions used throughout:

* ``J^mu = <alpha^mu psi, psi>`` with ``<u, v> = u1 conj(v1) + u2 conj(v2)``.
* Potentials are slaved to the current by elliptic solves. The spatial
  current enters ``A_0`` with lowered index (metric ``(+,-,-)``), which is
  what makes the ``mu = 1, 2`` Chern-Simons equations hold along the flow:
  ``A_0 = -Delta^{-1}(d_2 J^1 - d_1 J^2)``, ``A_1 = Delta^{-1} d_2 J^0``,
  ``A_2 = -Delta^{-1} d_1 J^0``.
* The cubic term is the bracket ``Delta^{-1}(d_2<a1 p1,p2> - d_1<a2 p1,p2>
  + d_2<p1,p2> a1 - d_1<p1,p2> a2) p3`` taken literally, times
  ``sign_convention``.
* On the torus the spatial mean of a current cannot be sourced by periodic
  potentials, and Nyquist modes have no derivative, so every Chern-Simons
  residual is taken against the resolved current: ``J`` with its mean and
  Nyquist modes removed.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .fields import SpinorField, TorusGrid, Trajectory
from .spectral import (
    ALPHA1,
    ALPHA2,
    IDENTITY,
    ConsistencyError,
    derivative_symbol,
    inverse_laplacian_derivative_symbol,
    sobolev_norm,
)

DEFAULT_SIGN = 1


@dataclass(frozen=True)
class CurrentFields:
    J0: np.ndarray
    J1: np.ndarray
    J2: np.ndarray

    def __getitem__(self, mu):
        return (self.J0, self.J1, self.J2)[mu]


@dataclass(frozen=True)
class GaugePotentials:
    grid: TorusGrid
    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray

    def __getitem__(self, mu):
        return (self.A0, self.A1, self.A2)[mu]

    def d(self, mu: int, j: int) -> np.ndarray:
        """Spatial derivative d_j A_mu."""
        return _derivative(self.grid, self[mu], j)

    def coulomb_residual(self) -> np.ndarray:
        return self.d(1, 1) + self.d(2, 2)

    def F12(self) -> np.ndarray:
        return self.d(2, 1) - self.d(1, 2)


def _derivative(grid, f, j):
    return grid.ifft(derivative_symbol(grid, j).values * grid.fft(f)).real


def currents(psi: SpinorField, tol: float = 1e-13) -> CurrentFields:
    """Pointwise J^mu = <alpha^mu psi, psi>."""
    u = psi.physical
    p0, p1, p2 = kernels.bilinears(u, u)
    scale = max(1.0, float(np.max(np.abs(p0.real), initial=0.0)))
    for p in (p0, p1, p2):
        if np.max(np.abs(p.imag), initial=0.0) > tol * scale:
            raise ConsistencyError("current has an imaginary part; alpha matrices are not Hermitian")
    return CurrentFields(p0.real.copy(), p1.real.copy(), p2.real.copy())


@functools.lru_cache(maxsize=16)
def _elliptic_symbols(grid: TorusGrid):
    s1 = inverse_laplacian_derivative_symbol(grid, 1).values
    s2 = inverse_laplacian_derivative_symbol(grid, 2).values
    return s1, s2


def _potentials_from_currents(grid: TorusGrid, J: CurrentFields) -> GaugePotentials:
    s1, s2 = _elliptic_symbols(grid)
    j0, j1, j2 = (grid.fft(J[mu]) for mu in range(3))
    A0 = grid.ifft(-(s2 * j1 - s1 * j2)).real
    A1 = grid.ifft(s2 * j0).real
    A2 = grid.ifft(-s1 * j0).real
    return GaugePotentials(grid, A0, A1, A2)


def potentials(psi: SpinorField) -> GaugePotentials:
    """Coulomb-gauge potentials slaved to ``psi``."""
    return _potentials_from_currents(psi.grid, currents(psi))


# ---------------------------------------------------------------------------
# cubic nonlinearity


def nonlinear_coefficients(grid: TorusGrid, u1, u2, u3, sign_convention: int = DEFAULT_SIGN):
    """Fourier coefficients of the dealiased cubic term from physical arrays."""
    s1, s2 = _elliptic_symbols(grid)
    c0, c1, c2 = grid.fft(np.stack(kernels.bilinears(u1, u2)))
    S, V1, V2 = grid.ifft(np.stack([s2 * c1 - s1 * c2, s2 * c0, -s1 * c0]))
    out = grid.fft(kernels.apply_potential(S, V1, V2, u3))
    out *= grid.dealias_mask
    if sign_convention != 1:
        out *= sign_convention
    return out


def nonlinearity(psi1: SpinorField, psi2: SpinorField, psi3: SpinorField,
                 sign_convention: int = DEFAULT_SIGN) -> SpinorField:
    """The cubic term N(psi1, psi2, psi3), linear in psi1, psi3 and
    conjugate-linear in psi2. Output is dealiased, in Fourier space."""
    grid = psi1.grid
    if psi2.grid != grid or psi3.grid != grid:
        raise ValueError("grid mismatch")
    c = nonlinear_coefficients(grid, psi1.physical, psi2.physical, psi3.physical, sign_convention)
    return SpinorField(grid, c, "fourier")


# ---------------------------------------------------------------------------
# residuals along trajectories


def time_derivative(f: np.ndarray, dt: float) -> np.ndarray:
    """Fourth-order finite differences along axis 0 (one-sided at the ends)."""
    F = f.shape[0]
    if F < 5:
        raise ValueError(f"need at least 5 frames for 4th-order differences, got {F}")
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * dt)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * dt)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * dt)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * dt)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * dt)
    return d


def chern_simons_residual(traj: Trajectory) -> tuple[float, float, float]:
    """max over frames of ||(1/2) eps^{mu nu rho} F_{nu rho} + J^mu||_{L^2}, J resolved.

    ``mu = 0`` is ``F_12 + J^0``, ``mu = 1`` is ``F_20 + J^1`` and ``mu = 2`` is
    ``F_01 + J^2``; time derivatives of ``A`` use 4th-order differences.
    """
    if len(traj) < 5:
        raise ValueError(f"chern_simons_residual needs >= 5 frames, got {len(traj)}")
    grid = traj.grid
    Js, As = [], []
    for j in range(len(traj)):
        J = currents(traj.frame(j))
        Js.append(np.stack([J.J0, J.J1, J.J2]))
        A = _potentials_from_currents(grid, J)
        As.append(np.stack([A.A0, A.A1, A.A2]))
    Js = np.stack(Js)
    As = np.stack(As)
    dA = time_derivative(As, traj.dt)

    def l2(r):
        return np.sqrt(np.sum(r**2, axis=(-2, -1)) * grid.cell_area)

    keep = ~grid.nyquist_mask
    keep[0, 0] = False
    Jc = grid.ifft(grid.fft(Js) * keep).real
    F12 = _derivative(grid, As[:, 2], 1) - _derivative(grid, As[:, 1], 2)
    F20 = _derivative(grid, As[:, 0], 2) - dA[:, 2]
    F01 = dA[:, 1] - _derivative(grid, As[:, 0], 1)
    r0 = l2(F12 + Jc[:, 0])
    r1 = l2(F20 + Jc[:, 1])
    r2 = l2(F01 + Jc[:, 2])
    return float(r0.max()), float(r1.max()), float(r2.max())


def charge(traj: Trajectory) -> np.ndarray:
    """||psi(t)||_{L^2}^2 per frame."""
    return np.sum(np.abs(traj.frames) ** 2, axis=(1, 2, 3)) * traj.grid.cell_area


# ---------------------------------------------------------------------------
# quadrilinear form


def _check_lattices(trajs):
    t0 = trajs[0]
    for t in trajs[1:]:
        if t.grid != t0.grid or t.frames.shape != t0.frames.shape or t.dt != t0.dt:
            raise ValueError("trajectories live on different space-time lattices")


def quadrilinear_form(traj1: Trajectory, traj2: Trajectory, traj3: Trajectory, traj4: Trajectory,
                      sign_convention: int = DEFAULT_SIGN) -> tuple[complex, complex]:
    """int <N(psi1, psi2, psi3), psi4> dx dt by two routes.

    Route A sums the pairing on the grid. Route B sums the Fourier-side
    symbol ``-i |xi0|^-2 [xi0_2 (...alpha1...) - xi0_1 (...alpha2...)]`` over
    ``xi1 - xi2 = xi4 - xi3 = xi0`` and ``tau1 - tau2 = tau4 - tau3``
    (cyclic in time). Inputs are dealiased first; the time integral runs
    over the periodic samples ``frames[:-1]``.
    """
    trajs = (traj1, traj2, traj3, traj4)
    _check_lattices(trajs)
    grid = traj1.grid
    mask = grid.dealias_mask
    coeffs = [grid.fft(t.periodic_samples()) * mask for t in trajs]
    M = coeffs[0].shape[0]
    period = M * traj1.dt

    # route A: physical space
    phys = [grid.ifft(c) for c in coeffs]
    total_a = 0.0 + 0.0j
    for t in range(M):
        Nc = nonlinear_coefficients(grid, phys[0][t], phys[1][t], phys[2][t], sign_convention)
        Nx = grid.ifft(Nc)
        total_a += np.sum(Nx * np.conj(phys[3][t]))
    route_a = complex(total_a * grid.cell_area * traj1.dt)

    # route B: space-time Fourier side
    k1, k2 = grid.k
    kk = np.stack([k1[mask], k2[mask]], axis=1)
    hat = [np.fft.fft(c[..., mask], axis=0) / M for c in coeffs]  # (M, 2, K)
    R = grid.n // 2
    P = [kernels.pair_convolution(hat[0], hat[1], m, kk, R) for m in (IDENTITY, ALPHA1, ALPHA2)]
    Q = [kernels.pair_convolution(hat[2], hat[3], m, kk, R) for m in (IDENTITY, ALPHA1, ALPHA2)]
    # Q index (tau3 - tau4, k3 - k4) = (-tau0, -k0)
    Q = [np.roll(q[::-1, ::-1, ::-1], 1, axis=0) for q in Q]
    d = np.arange(-R, R + 1)
    K1, K2 = np.meshgrid(d, d, indexing="ij")
    scale = 2 * np.pi / grid.L
    x1, x2 = scale * K1, scale * K2
    r2 = x1**2 + x2**2
    keep = (r2 > 0) & (np.abs(K1) < R) & (np.abs(K2) < R)
    w = np.zeros_like(r2)
    w[keep] = 1.0 / r2[keep]
    q = -1j * w * (x2 * (P[1] * Q[0] + P[0] * Q[1]) - x1 * (P[2] * Q[0] + P[0] * Q[2]))
    route_b = complex(sign_convention * period * grid.L**2 * np.sum(q))
    return route_a, route_b


# ---------------------------------------------------------------------------
# diagnostic ratios


def trilinear_l2_ratio(psi: SpinorField, sign_convention: int = DEFAULT_SIGN) -> float:
    """||N(psi, psi, psi)||_{L^2} / ||psi||_{H^{1/3}}^3."""
    denom = sobolev_norm(psi, 1 / 3) ** 3
    if denom == 0:
        raise ValueError("trilinear_l2_ratio is undefined for the zero field")
    return sobolev_norm(nonlinearity(psi, psi, psi, sign_convention), 0.0) / denom


@dataclass(frozen=True)
class PotentialRegularity:
    a_hdot_2s: float
    a_hdot_eps: float
    psi_hs_sq: float

    @property
    def ratio(self) -> float:
        return self.a_hdot_2s / self.psi_hs_sq if self.psi_hs_sq else 0.0


def potential_regularity_report(psi: SpinorField, s: float, eps: float = 1e-2) -> PotentialRegularity:
    """max_mu ||A_mu|| in homogeneous H^{2s} and H^eps, next to ||psi||_{H^s}^2."""
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    A = potentials(psi)
    grid = psi.grid
    n2s = max(sobolev_norm(A[mu], 2 * s, homogeneous=True, grid=grid) for mu in range(3))
    neps = max(sobolev_norm(A[mu], eps, homogeneous=True, grid=grid) for mu in range(3))
    return PotentialRegularity(n2s, neps, sobolev_norm(psi, s) ** 2)
