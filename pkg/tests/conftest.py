import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20250811)


def random_state(n_qubits: int, rng: np.random.Generator):
    """A normalized random state vector."""
    n = 1 << n_qubits
    amps = rng.normal(size=n) + 1j * rng.normal(size=n)
    amps /= np.linalg.norm(amps)
    from qsetsep.qsim import StateVector

    return StateVector(n_qubits, amps.astype(np.complex128))
