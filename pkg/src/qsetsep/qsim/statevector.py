"""Dense state-vector register model.

Conventions, used consistently everywhere:

* qubit 0 is the least-significant bit of the basis index;
* operations return a new :class:`StateVector` and never mutate their input
  (internal drivers work in place on buffers they own);
* measurement samples the Born rule but does not collapse the input state;
  collapse, when needed, is the caller's job;
* registers are capped at :data:`MAX_QUBITS` qubits (2**24 amplitudes,
  256 MiB of complex128), enforced by every allocating entry point.
"""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import ResourceLimitError
from . import _backend

MAX_QUBITS = 24

MarkedSpec = Callable[[int], bool] | np.ndarray | Sequence[int]


@dataclass(frozen=True)
class StateVector:
    """2**n_qubits complex amplitudes; treat as immutable."""

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        if self.amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"amps has shape {self.amps.shape}, expected {(1 << self.n_qubits,)}"
            )

    @property
    def n_states(self) -> int:
        return 1 << self.n_qubits

    def probabilities(self) -> np.ndarray:
        return np.real(self.amps * self.amps.conj())

    def norm_error(self) -> float:
        return abs(float(np.real(self.amps * self.amps.conj()).sum()) - 1.0)


@dataclass(frozen=True)
class MeasurementOutcome:
    index: int
    probability: float


def check_register_size(n_qubits: int) -> None:
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    if n_qubits > MAX_QUBITS:
        raise ResourceLimitError(
            f"register of {n_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit "
            f"(2**{MAX_QUBITS} amplitudes)"
        )


def init_uniform(n_qubits: int) -> StateVector:
    """Uniform superposition over all 2**n basis states (H on every qubit)."""
    check_register_size(n_qubits)
    n = 1 << n_qubits
    amps = np.full(n, 1.0 / math.sqrt(n), dtype=np.complex128)
    return StateVector(n_qubits, amps)


def basis_state(n_qubits: int, index: int) -> StateVector:
    check_register_size(n_qubits)
    n = 1 << n_qubits
    if not 0 <= index < n:
        raise ValueError(f"index {index} out of range [0, {n})")
    amps = np.zeros(n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n_qubits, amps)


def as_mask(n_qubits: int, marked: MarkedSpec) -> np.ndarray:
    """Coerce a predicate, index collection, or bool array to a bool mask."""
    n = 1 << n_qubits
    if isinstance(marked, np.ndarray) and marked.dtype == np.bool_:
        if marked.shape != (n,):
            raise ValueError(f"mask has shape {marked.shape}, expected ({n},)")
        return np.ascontiguousarray(marked)
    if callable(marked):
        return np.fromiter((bool(marked(x)) for x in range(n)), np.bool_, count=n)
    mask = np.zeros(n, dtype=np.bool_)
    idx = np.asarray(list(marked), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ValueError("marked index out of range")
    mask[idx] = True
    return mask


def apply_phase_oracle(state: StateVector, marked: MarkedSpec) -> StateVector:
    """Flip the sign of every marked amplitude."""
    mask = as_mask(state.n_qubits, marked)
    amps = state.amps.copy()
    _backend.kernels.phase_flip(amps, mask)
    return StateVector(state.n_qubits, amps)


def apply_diffusion(state: StateVector) -> StateVector:
    """Grover's inversion about the mean: amps <- 2*mean(amps) - amps."""
    amps = state.amps.copy()
    _backend.kernels.invert_about_mean(amps)
    return StateVector(state.n_qubits, amps)


def apply_hadamard(state: StateVector, qubit: int) -> StateVector:
    _check_qubit(state, qubit)
    amps = state.amps.copy()
    _backend.kernels.hadamard(amps, qubit)
    return StateVector(state.n_qubits, amps)


def apply_cphase(state: StateVector, q1: int, q2: int, angle: float) -> StateVector:
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise ValueError("controlled phase needs two distinct qubits")
    amps = state.amps.copy()
    _backend.kernels.cphase(amps, q1, q2, angle)
    return StateVector(state.n_qubits, amps)


def apply_swap(state: StateVector, q1: int, q2: int) -> StateVector:
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    amps = state.amps.copy()
    _backend.kernels.swap(amps, q1, q2)
    return StateVector(state.n_qubits, amps)


def apply_qft(state: StateVector, targets: Sequence[int]) -> StateVector:
    """Discrete Fourier transform on the sub-register spanned by `targets`.

    targets[0] is the least-significant bit of the transformed value k:
    |k> -> 2**(-t/2) * sum_m exp(2*pi*i*k*m / 2**t) |m>.
    """
    _check_targets(state, targets)
    amps = state.amps.copy()
    _qft_inplace(amps, list(targets), inverse=False)
    return StateVector(state.n_qubits, amps)


def apply_inverse_qft(state: StateVector, targets: Sequence[int]) -> StateVector:
    """Adjoint of :func:`apply_qft` on the same target convention."""
    _check_targets(state, targets)
    amps = state.amps.copy()
    _qft_inplace(amps, list(targets), inverse=True)
    return StateVector(state.n_qubits, amps)


def measure_all(state: StateVector, rng_seed: int) -> MeasurementOutcome:
    """Sample a basis index from |amps|^2; the input state is not modified."""
    probs = state.probabilities()
    cum = np.cumsum(probs)
    u = np.random.default_rng(rng_seed).random()
    index = int(np.searchsorted(cum, u * cum[-1], side="right"))
    index = min(index, state.n_states - 1)
    return MeasurementOutcome(index=index, probability=float(probs[index]))


def states_equal(
    a: StateVector,
    b: StateVector,
    *,
    up_to_global_phase: bool = True,
    atol: float = 1e-10,
) -> bool:
    if a.n_qubits != b.n_qubits:
        return False
    va, vb = a.amps, b.amps
    if up_to_global_phase:
        k = int(np.argmax(np.abs(va)))
        if abs(va[k]) > atol and abs(vb[k]) > atol:
            vb = vb * (va[k] / abs(va[k])) * (abs(vb[k]) / vb[k])
    return bool(np.allclose(va, vb, atol=atol))


def _check_qubit(state: StateVector, q: int) -> None:
    if not 0 <= q < state.n_qubits:
        raise ValueError(f"qubit {q} out of range [0, {state.n_qubits})")


def _check_targets(state: StateVector, targets: Sequence[int]) -> None:
    if len(targets) == 0:
        raise ValueError("empty target list")
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate qubits in targets {list(targets)}")
    for q in targets:
        _check_qubit(state, q)


def _qft_inplace(amps: np.ndarray, targets: list[int], *, inverse: bool) -> None:
    """Shared gate-level (inverse) QFT used by the public ops and qcount."""
    k = _backend.kernels
    t = len(targets)
    if inverse:
        for i in range(t // 2):
            k.swap(amps, targets[i], targets[t - 1 - i])
        for i in range(t):
            for j in range(i):
                k.cphase(amps, targets[j], targets[i], -2.0 * math.pi / (1 << (i - j + 1)))
            k.hadamard(amps, targets[i])
    else:
        for i in range(t - 1, -1, -1):
            k.hadamard(amps, targets[i])
            for j in range(i - 1, -1, -1):
                k.cphase(amps, targets[j], targets[i], 2.0 * math.pi / (1 << (i - j + 1)))
        for i in range(t // 2):
            k.swap(amps, targets[i], targets[t - 1 - i])
