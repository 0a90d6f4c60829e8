import numpy as np
import pytest

from dirac_tsfp import GridSpec, SpinorField

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_field(rng, grid):
    vals = rng.normal(size=(2, grid.M)) + 1j * rng.normal(size=(2, grid.M))
    return SpinorField(grid, vals)


@pytest.fixture
def unit_grid():
    return GridSpec(0.0, 1.0, 8)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
