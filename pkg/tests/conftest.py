import numpy as np
import pytest

from cliffstbc.clifford import pauli_basis
from cliffstbc.construct import construct_general, preset_dsd, preset_ssd

EXAMPLE2_B = [[1, 1, 1], [1, 1, -1], [-1, 1, 1]]


@pytest.fixture(scope="session")
def paulis():
    return pauli_basis()


@pytest.fixture(scope="session")
def example2():
    return construct_general(6, 4, "identity")


@pytest.fixture(scope="session")
def ssd4():
    return preset_ssd(2)


@pytest.fixture(scope="session")
def dsd8():
    return preset_dsd(3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def pytest_terminal_summary(terminalreporter):
    import sys

    test_acceptance = sys.modules.get("test_acceptance")
    if test_acceptance is not None and test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[num])
