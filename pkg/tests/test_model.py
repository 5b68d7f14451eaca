import numpy as np
import pytest
from hypothesis import given, strategies as st

from csdsim.fields import SpinorField, TorusGrid, Trajectory
from csdsim.model import (
    chern_simons_residual, currents, nonlinearity, potential_regularity_report, potentials,
    quadrilinear_form, time_derivative, trilinear_l2_ratio,
)

from conftest import random_spinor
from oracles import A1, A2, mode, pointwise_currents


def _const(grid, c1, c2):
    return SpinorField(grid, np.stack([np.full((grid.n, grid.n), c1, complex), np.full((grid.n, grid.n), c2, complex)]))


def reference_nonlinearity(grid, u1, u2, u3, sign=1):
    """Cubic term assembled with explicit matrices and a hand-made elliptic symbol."""
    k = np.fft.fftfreq(grid.n, 1.0 / grid.n) * 2 * np.pi / grid.L
    X1, X2 = np.meshgrid(k, k, indexing="ij")
    r2 = X1**2 + X2**2
    r2[0, 0] = 1.0
    nyq = (np.abs(np.fft.fftfreq(grid.n, 1.0 / grid.n)) == grid.n // 2)
    nyq = nyq[:, None] | nyq[None, :]

    def ild(f, X):
        sym = -1j * X / r2
        sym[0, 0] = 0
        sym[nyq] = 0
        return np.fft.ifft2(sym * np.fft.fft2(f))

    def pair(M):
        return np.einsum("ij,jxy,ixy->xy", M, u1, np.conj(u2))

    p0, p1, p2 = pair(np.eye(2)), pair(A1), pair(A2)
    S = ild(p1, X2) - ild(p2, X1)
    V1, V2 = ild(p0, X2), -ild(p0, X1)
    N = S * u3 + V1 * np.einsum("ij,jxy->ixy", A1, u3) + V2 * np.einsum("ij,jxy->ixy", A2, u3)
    c = np.fft.fft2(N) / grid.n**2
    c[:, ~grid.dealias_mask] = 0
    return sign * c


@pytest.mark.parametrize("c,expected", [((1, 0), (1, 0, 0)), ((0, 0), (0, 0, 0)),
                                        ((2**-0.5, 2**-0.5), (1, 0, 1))])
def test_currents_of_constant_spinors(grid16, c, expected):
    J = currents(_const(grid16, *c))
    for mu in range(3):
        np.testing.assert_allclose(J[mu], expected[mu], atol=1e-15)


def test_currents_match_matrix_oracle(rng, grid16):
    psi = random_spinor(rng, grid16)
    J = currents(psi)
    ref = pointwise_currents(psi.physical)
    for mu in range(3):
        np.testing.assert_allclose(J[mu], ref[mu].real, atol=1e-13)


def test_potentials_vanish_for_plane_wave_and_constant(grid16):
    pw = SpinorField(grid16, np.stack([mode(grid16, 1, 0), 0 * mode(grid16, 1, 0)]))
    for psi in (pw, _const(grid16, 0.3, -1j)):
        A = potentials(psi)
        for mu in range(3):
            assert np.max(np.abs(A[mu])) < 1e-14


def test_coulomb_gauge_and_mu0_identity(rng, grid64):
    psi = random_spinor(rng, grid64)
    A = potentials(psi)
    J0 = currents(psi).J0
    resolved = grid64.ifft(grid64.fft(J0) * ~grid64.nyquist_mask)
    resolved = (resolved - resolved.mean()).real
    assert np.max(np.abs(A.coulomb_residual())) < 1e-12
    np.testing.assert_allclose(A.F12(), -resolved, atol=1e-12)


def test_nonlinearity_matches_reference(rng, grid16):
    us = [random_spinor(rng, grid16) for _ in range(3)]
    for sign in (1, -1):
        got = nonlinearity(*us, sign_convention=sign).coefficients
        ref = reference_nonlinearity(grid16, *(u.physical for u in us), sign)
        np.testing.assert_allclose(got, ref, atol=1e-12)


def test_nonlinearity_vanishes_on_constants_and_plane_wave(rng, grid16):
    c1, c2 = _const(grid16, 1, 2j), _const(grid16, -0.5, 1)
    psi3 = random_spinor(rng, grid16)
    assert np.max(np.abs(nonlinearity(c1, c2, psi3).coefficients)) < 1e-14
    pw = SpinorField(grid16, np.stack([mode(grid16, 1, 0), 0 * mode(grid16, 1, 0)]))
    assert np.max(np.abs(nonlinearity(pw, pw, pw).coefficients)) < 1e-14


@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_nonlinearity_linearity(c):
    rng = np.random.default_rng(5)
    grid = TorusGrid(8)
    a, b, d = (random_spinor(rng, grid) for _ in range(3))
    base = nonlinearity(a, b, d).coefficients
    np.testing.assert_allclose(nonlinearity(a * c, b, d).coefficients, c * base, atol=1e-12)
    np.testing.assert_allclose(nonlinearity(a, b * c, d).coefficients, np.conj(c) * base, atol=1e-12)
    np.testing.assert_allclose(nonlinearity(a, b, d * c).coefficients, c * base, atol=1e-12)


def test_nonlinearity_grid_mismatch(grid16):
    with pytest.raises(ValueError):
        nonlinearity(SpinorField.zeros(grid16), SpinorField.zeros(TorusGrid(8)), SpinorField.zeros(grid16))


def test_time_derivative_is_exact_on_quartics():
    t = np.linspace(0, 1, 11)
    f = 1 + 2 * t - t**2 + 0.5 * t**3 - 3 * t**4
    df = 2 - 2 * t + 1.5 * t**2 - 12 * t**3
    np.testing.assert_allclose(time_derivative(f, t[1] - t[0]), df, atol=1e-11)
    with pytest.raises(ValueError):
        time_derivative(f[:4], 0.1)


def test_cs_residual_of_free_plane_wave(grid16):
    times = np.linspace(0, 0.5, 11)
    frames = np.stack([np.stack([mode(grid16, 1, 0) * np.exp(-1j * t), 0 * mode(grid16, 0, 0)]) for t in times])
    r = chern_simons_residual(Trajectory(grid16, frames, times[1] - times[0]))
    assert max(r) <= 1e-10


def test_cs_residual_mu0_on_random_frames(rng, grid16):
    frames = np.stack([random_spinor(rng, grid16).physical for _ in range(6)])
    r0, _, _ = chern_simons_residual(Trajectory(grid16, frames, 0.1))
    assert r0 <= 1e-12
    with pytest.raises(ValueError):
        chern_simons_residual(Trajectory(grid16, frames[:4], 0.1))


def _random_traj(rng, grid, M, band=2):
    return Trajectory(grid, np.stack([random_spinor(rng, grid, band=band).physical for _ in range(M + 1)]), 0.1)


def test_quadrilinear_routes_agree(rng):
    grid = TorusGrid(8)
    trajs = [_random_traj(rng, grid, 8) for _ in range(4)]
    for sign in (1, -1):
        a, b = quadrilinear_form(*trajs, sign_convention=sign)
        assert abs(a - b) <= 1e-9 * abs(a)


def test_quadrilinear_zero_and_constant(rng):
    grid = TorusGrid(8)
    zero = Trajectory(grid, np.zeros((9, 2, 8, 8)), 0.1)
    assert quadrilinear_form(zero, zero, zero, zero) == (0, 0)
    const = Trajectory(grid, np.ones((9, 2, 8, 8)) * (1 + 2j), 0.1)
    other = _random_traj(rng, grid, 8)
    a, b = quadrilinear_form(const, const, other, other)
    assert abs(a) < 1e-12 and abs(b) < 1e-12


def test_quadrilinear_rejects_mismatched_lattices(rng):
    grid = TorusGrid(8)
    t8, t6 = _random_traj(rng, grid, 8), _random_traj(rng, grid, 6)
    with pytest.raises(ValueError):
        quadrilinear_form(t8, t8, t8, t6)


def test_trilinear_ratio_scaling_and_errors(rng, grid16):
    psi = random_spinor(rng, grid16, band=4)
    r = trilinear_l2_ratio(psi)
    assert trilinear_l2_ratio(psi * 7.5) == pytest.approx(r, rel=1e-10)
    assert trilinear_l2_ratio(_const(grid16, 1, 1j)) == pytest.approx(0, abs=1e-15)
    with pytest.raises(ValueError):
        trilinear_l2_ratio(SpinorField.zeros(grid16))


def test_potential_regularity(rng, grid16):
    rep = potential_regularity_report(_const(grid16, 1, 0.5), 0.4)
    assert rep.a_hdot_2s == 0 and rep.a_hdot_eps == 0
    pw = SpinorField(grid16, np.stack([mode(grid16, 2, 1), 0 * mode(grid16, 0, 0)]))
    rep = potential_regularity_report(pw, 0.4)
    assert rep.a_hdot_2s < 1e-12 and rep.a_hdot_eps < 1e-12
    rep = potential_regularity_report(random_spinor(rng, grid16), 0.4)
    assert rep.a_hdot_2s > 0 and rep.psi_hs_sq > 0 and rep.ratio > 0
    for s, eps in ((0, 0.1), (1, 0.1), (0.5, 0), (0.5, 1.5)):
        with pytest.raises(ValueError):
            potential_regularity_report(pw, s, eps)
