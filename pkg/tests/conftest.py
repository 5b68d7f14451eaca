import numpy as np
import pytest
from hypothesis import settings

from csdsim.fields import SpinorField, TorusGrid

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spinor(rng, grid, band=None, scale=1.0):
    """Complex Gaussian field; ``band`` limits max(|k1|, |k2|)."""
    data = rng.standard_normal((2, grid.n, grid.n)) + 1j * rng.standard_normal((2, grid.n, grid.n))
    psi = SpinorField(grid, scale * data)
    if band is None:
        return psi
    k1, k2 = grid.k
    mask = np.maximum(np.abs(k1), np.abs(k2)) <= band
    return SpinorField(grid, psi.coefficients * mask, "fourier").to_physical()


@pytest.fixture
def grid16():
    return TorusGrid(16)


@pytest.fixture
def grid64():
    return TorusGrid(64)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS, key=lambda k: (int(k.rstrip("ab")), k)):
        terminalreporter.write_line(mod.RESULTS[key])
