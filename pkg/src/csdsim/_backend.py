"""Backend selection for the hot kernels.

Set ``CSDSIM_NUMBA=0`` in the environment to force the pure-numpy path.
The flag is read once, at import time.
"""
from __future__ import annotations

import os

try:
    import numba
except Exception:  # llvmlite failures surface as arbitrary exceptions
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("CSDSIM_NUMBA", "1") not in ("0", "false", "no")


def njit_options():
    return dict(cache=True, nogil=True, fastmath=False, error_model="numpy")


def maybe_njit(fn):
    """Compile ``fn`` with numba when available, else return ``None``."""
    if not NUMBA_AVAILABLE:
        return None
    return numba.njit(**njit_options())(fn)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
