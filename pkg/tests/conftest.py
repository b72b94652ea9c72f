import numpy as np
import pytest

from fockcontext.fock_core import enumerate_basis


@pytest.fixture
def qutrit():
    return enumerate_basis(2, 2)


@pytest.fixture
def four_mode():
    return enumerate_basis(4, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
