import numpy as np
import pytest

from cavity_gauge.dipole import DoubleWellParams, solve_double_well


@pytest.fixture(scope="session")
def model():
    """Default double-well dipole with enough levels for every cutoff ceiling."""
    return solve_double_well(DoubleWellParams(), 16)


@pytest.fixture(scope="session")
def omega_m(model):
    return model.omega_m


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def random_state(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
