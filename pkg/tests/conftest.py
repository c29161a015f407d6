import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix: normalized A A^dag."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def coin_op_full(u: np.ndarray, positions: int) -> np.ndarray:
    """U (x) 1 as an explicit matrix, for small-dimension references."""
    return np.kron(u, np.eye(positions))
