"""Hot pointwise and convolution kernels.

Each kernel exists twice: a vectorized numpy version and an explicit-loop
version compiled with numba. The public name dispatches on
``_backend.USE_NUMBA``; both variants stay importable for testing and
benchmarking.

Spinor arrays carry the component axis first: shape ``(2, ...)``.
The Hermitian pairing is ``<u, v> = u1*conj(v1) + u2*conj(v2)``.
"""
from __future__ import annotations

import numpy as np

from . import _backend

# ---------------------------------------------------------------------------
# spinor bilinears  <u, v>, <alpha1 u, v>, <alpha2 u, v>
# alpha1 = [[0, i], [-i, 0]],  alpha2 = [[0, 1], [1, 0]]


def bilinears_numpy(u, v):
    u1, u2 = u[0], u[1]
    c1, c2 = np.conj(v[0]), np.conj(v[1])
    p0 = u1 * c1 + u2 * c2
    p1 = 1j * (u2 * c1 - u1 * c2)
    p2 = u2 * c1 + u1 * c2
    return p0, p1, p2


def _bilinears_loop(u1, u2, v1, v2, p0, p1, p2):
    for i in range(u1.shape[0]):
        a1 = u1[i]
        a2 = u2[i]
        c1 = v1[i].conjugate()
        c2 = v2[i].conjugate()
        p0[i] = a1 * c1 + a2 * c2
        p1[i] = 1j * (a2 * c1 - a1 * c2)
        p2[i] = a2 * c1 + a1 * c2


_bilinears_jit = _backend.maybe_njit(_bilinears_loop)


def bilinears_numba(u, v):
    shape = u.shape[1:]
    u = np.ascontiguousarray(u, dtype=np.complex128).reshape(2, -1)
    v = np.ascontiguousarray(v, dtype=np.complex128).reshape(2, -1)
    p = np.empty((3, u.shape[1]), dtype=np.complex128)
    _bilinears_jit(u[0], u[1], v[0], v[1], p[0], p[1], p[2])
    return p[0].reshape(shape), p[1].reshape(shape), p[2].reshape(shape)


# ---------------------------------------------------------------------------
# (S + V1 alpha1 + V2 alpha2) w, pointwise


def apply_potential_numpy(S, V1, V2, w):
    w1, w2 = w[0], w[1]
    out = np.empty(w.shape, dtype=np.complex128)
    out[0] = S * w1 + 1j * V1 * w2 + V2 * w2
    out[1] = S * w2 - 1j * V1 * w1 + V2 * w1
    return out


def _apply_potential_loop(S, V1, V2, w1, w2, o1, o2):
    for i in range(S.shape[0]):
        s = S[i]
        a = V1[i]
        b = V2[i]
        x = w1[i]
        y = w2[i]
        o1[i] = s * x + (1j * a + b) * y
        o2[i] = s * y + (b - 1j * a) * x


_apply_potential_jit = _backend.maybe_njit(_apply_potential_loop)


def apply_potential_numba(S, V1, V2, w):
    shape = w.shape
    flat = [np.ascontiguousarray(x, dtype=np.complex128).ravel() for x in (S, V1, V2)]
    w = np.ascontiguousarray(w, dtype=np.complex128).reshape(2, -1)
    out = np.empty_like(w)
    _apply_potential_jit(flat[0], flat[1], flat[2], w[0], w[1], out[0], out[1])
    return out.reshape(shape)


# ---------------------------------------------------------------------------
# difference convolution on the space-time Fourier side
#
#   out[(t1 - t2) % M, k1 - k2 + R] += <mat a[t1, :, k1], b[t2, :, k2]>
#
# a, b: (M, 2, K) coefficients on K active spatial modes with integer
# wavenumbers kk: (K, 2). R = max difference, output (M, 2R+1, 2R+1).


def pair_convolution_numpy(a, b, mat, kk, R):
    M = a.shape[0]
    ma = np.einsum("ij,tjk->tik", mat, a)
    g = np.einsum("tik,sil->tskl", ma, np.conj(b))
    t = np.arange(M)
    dt = (t[:, None] - t[None, :]) % M
    dk = kk[:, None, :] - kk[None, :, :] + R
    out = np.zeros((M, 2 * R + 1, 2 * R + 1), dtype=np.complex128)
    idx_t = np.broadcast_to(dt[:, :, None, None], g.shape)
    idx_x = np.broadcast_to(dk[None, None, :, :, 0], g.shape)
    idx_y = np.broadcast_to(dk[None, None, :, :, 1], g.shape)
    np.add.at(out, (idx_t.ravel(), idx_x.ravel(), idx_y.ravel()), g.ravel())
    return out


def _pair_convolution_loop(a, b, mat, kk, R, out):
    M = a.shape[0]
    K = a.shape[2]
    m00 = mat[0, 0]
    m01 = mat[0, 1]
    m10 = mat[1, 0]
    m11 = mat[1, 1]
    for t1 in range(M):
        for k1 in range(K):
            x1 = m00 * a[t1, 0, k1] + m01 * a[t1, 1, k1]
            x2 = m10 * a[t1, 0, k1] + m11 * a[t1, 1, k1]
            for t2 in range(M):
                t0 = (t1 - t2) % M
                for k2 in range(K):
                    val = x1 * b[t2, 0, k2].conjugate() + x2 * b[t2, 1, k2].conjugate()
                    out[t0, kk[k1, 0] - kk[k2, 0] + R, kk[k1, 1] - kk[k2, 1] + R] += val


_pair_convolution_jit = _backend.maybe_njit(_pair_convolution_loop)


def pair_convolution_numba(a, b, mat, kk, R):
    M = a.shape[0]
    out = np.zeros((M, 2 * R + 1, 2 * R + 1), dtype=np.complex128)
    _pair_convolution_jit(
        np.ascontiguousarray(a, dtype=np.complex128),
        np.ascontiguousarray(b, dtype=np.complex128),
        np.ascontiguousarray(mat, dtype=np.complex128),
        np.ascontiguousarray(kk, dtype=np.int64),
        int(R),
        out,
    )
    return out


if _backend.USE_NUMBA:
    bilinears = bilinears_numba
    apply_potential = apply_potential_numba
    pair_convolution = pair_convolution_numba
else:
    bilinears = bilinears_numpy
    apply_potential = apply_potential_numpy
    pair_convolution = pair_convolution_numpy
