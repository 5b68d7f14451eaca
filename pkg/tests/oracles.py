"""Independent reference computations used by several test modules.

Nothing here imports the routines under test beyond basic containers.
"""
import numpy as np

A1 = np.array([[0, 1j], [-1j, 0]])
A2 = np.array([[0, 1], [1, 0]])
B = np.diag([1.0, -1.0]).astype(complex)


def mode(grid, k1, k2):
    x1, x2 = grid.x
    return np.exp(1j * (k1 * x1 + k2 * x2) * 2 * np.pi / grid.L)


def project_mode(k1, k2, v, sign):
    """Pi_sign(xi) v for one lattice vector, by 2x2 arithmetic."""
    r = np.hypot(k1, k2)
    w = (k1 / r, k2 / r) if r else (1.0, 0.0)
    P = 0.5 * (np.eye(2) + sign * (w[0] * A1 + w[1] * A2))
    return P @ np.asarray(v, dtype=complex)


def pointwise_currents(u):
    """J^mu = <alpha^mu u, u> by explicit matrix products at every point."""
    uu = u.reshape(2, -1)
    out = []
    for M in (np.eye(2), A1, A2):
        out.append(np.einsum("ij,jp,ip->p", M, uu, np.conj(uu)).reshape(u.shape[1:]))
    return out


def float_admissible(t, eps=1e-9):
    """The 18 product-estimate conditions written out in plain floats.

    ``t`` maps names to (q, k) pairs meaning q + k*eps.
    """
    v = {name: float(q) + float(k) * eps for name, (q, k) in t.items()}
    s0, s1, s2, b0, b1, b2 = (v[n] for n in ("s0", "s1", "s2", "b0", "b1", "b2"))
    S = s0 + s1 + s2
    checks = [
        b0 + b1 + b2 > 0.5, b0 + b1 > 0, b0 + b2 > 0, b1 + b2 > 0,
        S > 1.5 - (b0 + b1 + b2), S > 1 - (b0 + b1), S > 1 - (b0 + b2), S > 1 - (b1 + b2),
        S > 0.5 - b0, S > 0.5 - b1, S > 0.5 - b2, S > 0.75,
        (s0 + b0) + 2 * s1 + 2 * s2 > 1, 2 * s0 + (s1 + b1) + 2 * s2 > 1, 2 * s0 + 2 * s1 + (s2 + b2) > 1,
        s1 + s2 >= max(0.0, -b0), s0 + s2 > max(0.0, -b1), s0 + s1 > max(0.0, -b2),
    ]
    return all(checks)


def first_factor_float(s, eps=1e-9):
    return float_admissible({"s0": (0.25, -1), "b0": (-0.25, -1), "s1": (s, 0), "s2": (s, 0),
                             "b1": (0.5, 1), "b2": (0.5, 1)}, eps)


def bisect(pred, lo, hi, tol=1e-12):
    """Smallest point where ``pred`` turns true, given pred(lo) false, pred(hi) true."""
    assert not pred(lo) and pred(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if pred(mid) else (mid, hi)
    return hi
