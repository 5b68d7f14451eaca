"""Space-time Fourier estimators of X^{s,b}_pm and H^{s,b} norms.

A trajectory is read as one period of a T-periodic signal sampled at
``frames[:-1]``. Coefficients are scaled so that their l^2 norm equals the
discrete ``L^2_{t,x}`` norm ``(sum |psi|^2 dx^2 dt)^(1/2)`` (Plancherel with
unit constant). The temporal lattice is ``tau = 2*pi/T * j``. When the
number of samples is even, the Nyquist bin is ambiguous between
``+-tau_N``; its weight is the mean of the two squared weights, which keeps
both Plancherel and the time-reversal symmetry exact.

These are periodized estimators, not restriction norms on [0, T].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import Trajectory
from .spectral import ConsistencyError


@dataclass(frozen=True)
class SpaceTimeSpectrum:
    coefficients: np.ndarray  # (M, 2, n, n)
    tau: np.ndarray  # (M,)
    abs_xi: np.ndarray  # (n, n)
    nyquist_bin: int | None
    window: str

    def weighted_norm(self, weight_sq) -> float:
        """sqrt(sum w^2 |c|^2) with ``weight_sq(tau, |xi|)`` broadcasting over (M, n, n)."""
        power = np.sum(np.abs(self.coefficients) ** 2, axis=1)
        tau = self.tau[:, None, None]
        w2 = weight_sq(tau, self.abs_xi[None])
        if self.nyquist_bin is not None:
            j = self.nyquist_bin
            w2 = np.array(w2, dtype=float, copy=True)
            w2[j] = 0.5 * (weight_sq(self.tau[j], self.abs_xi) + weight_sq(-self.tau[j], self.abs_xi))
        return float(np.sqrt(np.sum(w2 * power)))

    def l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coefficients) ** 2)))


def taper(M: int, fraction: float = 0.1) -> np.ndarray:
    """Raised-cosine ramp over the outer ``fraction`` of the samples at each end."""
    w = np.ones(M)
    r = int(np.floor(fraction * M))
    if r > 0:
        ramp = 0.5 * (1 - np.cos(np.pi * (np.arange(r) + 0.5) / r))
        w[:r] = ramp
        w[M - r:] = ramp[::-1]
    return w


def spacetime_transform(traj: Trajectory, window: str | None = None) -> SpaceTimeSpectrum:
    samples = traj.periodic_samples()
    M = samples.shape[0]
    if M < 1:
        raise ValueError("trajectory needs at least two frames")
    if window in (None, "none"):
        window = "none"
    elif window == "smooth":
        samples = samples * taper(M)[:, None, None, None]
    else:
        raise ValueError(f"unknown window {window!r}")
    grid = traj.grid
    period = M * traj.dt
    c = np.fft.fft(grid.fft(samples), axis=0) / M
    c *= np.sqrt(period) * grid.L
    j = np.rint(np.fft.fftfreq(M) * M)
    tau = 2 * np.pi / period * j
    nyq = M // 2 if M % 2 == 0 and M > 1 else None
    return SpaceTimeSpectrum(c, tau, grid.abs_xi, nyq, window)


def _bracket_sq(x, b):
    return (1.0 + x**2) ** b


def xsb_norm(traj, s: float, b: float, sign: int, window: str | None = None) -> float:
    """Weight <xi>^s <tau + sign |xi|>^b."""
    spec = traj if isinstance(traj, SpaceTimeSpectrum) else spacetime_transform(traj, window)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return spec.weighted_norm(lambda tau, r: _bracket_sq(r, s) * _bracket_sq(tau + sign * r, b))


def hsb_norm(traj, s: float, b: float, window: str | None = None) -> float:
    """Weight <xi>^s <|tau| - |xi|>^b."""
    spec = traj if isinstance(traj, SpaceTimeSpectrum) else spacetime_transform(traj, window)
    return spec.weighted_norm(lambda tau, r: _bracket_sq(r, s) * _bracket_sq(np.abs(tau) - r, b))


@dataclass(frozen=True)
class EmbeddingReport:
    s: float
    b: float
    hsb: float
    xsb_plus: float
    xsb_minus: float

    @property
    def slack(self) -> float:
        return min(self.xsb_plus, self.xsb_minus) - self.hsb


def embedding_check(traj: Trajectory, s: float, b: float, rtol: float = 1e-12) -> EmbeddingReport:
    """Check ||f||_{H^{s,b}} <= ||f||_{X^{s,b}_pm} for both signs (b >= 0)."""
    if b < 0:
        raise ValueError("the embedding needs b >= 0")
    spec = spacetime_transform(traj)
    rep = EmbeddingReport(s, b, hsb_norm(spec, s, b), xsb_norm(spec, s, b, 1), xsb_norm(spec, s, b, -1))
    if rep.hsb > min(rep.xsb_plus, rep.xsb_minus) * (1 + rtol):
        raise ConsistencyError(f"embedding violated: H={rep.hsb:.6e}, X+={rep.xsb_plus:.6e}, X-={rep.xsb_minus:.6e}")
    return rep
