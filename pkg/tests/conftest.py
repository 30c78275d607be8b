import numpy as np
import pytest

from succmeter import ket_projector, pauli, spectral_decompose
from succmeter.operators import random_unitary

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
YPLUS = np.array([1, 1j], dtype=complex) / np.sqrt(2)


@pytest.fixture
def rho0():
    return ket_projector(KET0)


@pytest.fixture
def rho_plus():
    return ket_projector(PLUS)


@pytest.fixture
def rho_y():
    return ket_projector(YPLUS)


@pytest.fixture
def sx():
    return pauli("x")


@pytest.fixture
def sz():
    return pauli("z")


def random_observable(d, seed, eigenvalues=None):
    """U diag(eigenvalues) U^dag with a Haar-random U."""
    U = random_unitary(d, seed)
    if eigenvalues is None:
        eigenvalues = np.arange(d, dtype=float)
    return spectral_decompose(U @ np.diag(eigenvalues) @ U.conj().T)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
