import numpy as np
import pytest

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1, -1]).astype(complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@pytest.fixture
def sx():
    return SX.copy()


@pytest.fixture
def sz():
    return SZ.copy()


@pytest.fixture
def hadamard():
    return HADAMARD.copy()


def rng(seed):
    return np.random.default_rng(seed)


def opnorm(a):
    return float(np.linalg.norm(np.asarray(a, dtype=complex), 2))


def assert_close(a, b, atol=1e-10):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    gap = float(np.abs(a - b).max()) if a.size else 0.0
    assert gap <= atol, f"matrices differ by {gap:.3e} > {atol:.1e}"


def same_up_to_phase(u, v, atol=1e-8):
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    z = np.trace(v.conj().T @ u)
    if abs(z) < 1e-12:
        return False
    phase = z / abs(z)
    return float(np.abs(u - phase * v).max()) <= atol
