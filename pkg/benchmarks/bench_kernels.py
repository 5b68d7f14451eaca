"""Numba vs numpy timings for the hot kernels and for whole integrator steps.

    python3 benchmarks/bench_kernels.py [--n 64 128] [--repeat 20]

Kernel timings call both variants directly in this process. Step timings
run the integrator in a subprocess per backend so that the CSDSIM_NUMBA
flag is honored at import time.
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from csdsim import _backend, kernels


def _rand(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def time_call(fn, repeat):
    fn()  # warm-up (JIT compile on first call)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_rows(n, repeat, rng):
    u, v, w = (_rand(rng, (2, n, n)) for _ in range(3))
    S, V1, V2 = (_rand(rng, (n, n)) for _ in range(3))
    M, K, R = 8, 40, 8
    a, b = _rand(rng, (M, 2, K)), _rand(rng, (M, 2, K))
    kk = rng.integers(-R // 2, R // 2 + 1, size=(K, 2))
    mat = np.eye(2, dtype=np.complex128)
    cases = {
        "bilinears": (kernels.bilinears_numpy, kernels.bilinears_numba, (u, v)),
        "apply_potential": (kernels.apply_potential_numpy, kernels.apply_potential_numba, (S, V1, V2, w)),
        "pair_convolution": (kernels.pair_convolution_numpy, kernels.pair_convolution_numba, (a, b, mat, kk, R)),
    }
    rows = []
    for name, (f_np, f_nb, args) in cases.items():
        t_np = time_call(lambda: f_np(*args), repeat)
        t_nb = time_call(lambda: f_nb(*args), repeat) if _backend.NUMBA_AVAILABLE else float("nan")
        rows.append({"kernel": name, "n": n, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb})
    return rows


_STEP_SNIPPET = """
import json, time
from csdsim import _backend
from csdsim.fields import TorusGrid
from csdsim.data import make_initial_data
from csdsim.integrator import SolverConfig, integrate
from csdsim.spectral import dealias
g = TorusGrid({n})
psi = dealias(make_initial_data('random-hs(1.0, 0.05)', g, 0))
cfg = SolverConfig(n={n}, dt=1e-3, T=2e-3)
integrate(cfg, psi)
cfg = SolverConfig(n={n}, dt=1e-3, T={steps}e-3)
t0 = time.perf_counter(); integrate(cfg, psi); dt = time.perf_counter() - t0
print(json.dumps({{"backend": _backend.backend_name(), "seconds_per_step": dt / {steps}}}))
"""


def step_rows(n, steps=50):
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, CSDSIM_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", _STEP_SNIPPET.format(n=n, steps=steps)],
                             env=env, capture_output=True, text=True, check=True)
        rec = json.loads(res.stdout.strip().splitlines()[-1])
        out[rec["backend"]] = rec["seconds_per_step"]
    return {"kernel": "integrator_step", "n": n, "numpy_s": out.get("numpy"), "numba_s": out.get("numba"),
            "speedup": out["numpy"] / out["numba"] if "numba" in out else float("nan")}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[64, 128])
    p.add_argument("--repeat", type=int, default=20)
    p.add_argument("--no-steps", action="store_true", help="skip whole-step timings")
    args = p.parse_args(argv)
    rng = np.random.default_rng(0)
    rows = []
    for n in args.n:
        rows += kernel_rows(n, args.repeat, rng)
        if not args.no_steps:
            rows.append(step_rows(n))
    print(f"{'kernel':<18}{'n':>6}{'numpy [s]':>14}{'numba [s]':>14}{'speedup':>10}")
    for r in rows:
        print(f"{r['kernel']:<18}{r['n']:>6}{r['numpy_s']:>14.3e}{r['numba_s']:>14.3e}{r['speedup']:>10.2f}")
    return rows


if __name__ == "__main__":
    main()
