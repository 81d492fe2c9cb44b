"""Grover search: iteration operator, closed-form success math, optimal
iteration count, and a search driver."""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import qsim
from .qsim import MeasurementOutcome, StateVector
from .qsim import _backend


@dataclass(eq=False)
class OracleSpec:
    """A marked-index predicate over [0, 2**n_qubits).

    `marked` must be total over the index range. `exact_m`, when present,
    caches the brute-force solution count. The bool mask and counting
    distributions derived from the oracle are cached per instance, so reuse
    one OracleSpec when issuing repeated counts against the same predicate.
    """

    n_qubits: int
    marked: Callable[[int], bool]
    exact_m: int | None = None
    _mask: np.ndarray | None = field(default=None, repr=False)
    _dist_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        qsim.check_register_size(self.n_qubits)
        if self.exact_m is not None and not 0 <= self.exact_m <= self.n_states:
            raise ValueError(f"exact_m {self.exact_m} outside [0, {self.n_states}]")

    @property
    def n_states(self) -> int:
        return 1 << self.n_qubits

    @classmethod
    def from_mask(cls, n_qubits: int, mask: np.ndarray) -> "OracleSpec":
        mask = qsim.as_mask(n_qubits, np.asarray(mask, dtype=np.bool_))
        return cls(n_qubits, lambda x: bool(mask[x]), _mask=mask)

    @classmethod
    def from_indices(cls, n_qubits: int, indices: Sequence[int]) -> "OracleSpec":
        mask = qsim.as_mask(n_qubits, indices)
        return cls(n_qubits, lambda x: bool(mask[x]), _mask=mask)

    def mask(self) -> np.ndarray:
        if self._mask is None:
            self._mask = qsim.as_mask(self.n_qubits, self.marked)
        return self._mask


@dataclass(frozen=True)
class GroverPlan:
    """Iteration budget with its closed-form prediction.

    theta = arcsin(sqrt(M/N)); predicted_success = sin^2((2k+1) * theta).
    """

    iterations: int
    theta: float
    predicted_success: float


def predicted_success(theta: float, iterations: int) -> float:
    return math.sin((2 * iterations + 1) * theta) ** 2


def plan(n_qubits: int, m: int) -> GroverPlan:
    """Optimal iteration count for m solutions among 2**n_qubits states.

    Starts from floor(pi / (4*arcsin(sqrt(m/N)))) and adjusts to whichever
    of {k-1, k, k+1} predicts the highest success; ties go to the smallest k.
    """
    n = 1 << n_qubits
    if m == 0:
        raise ValueError("no solutions; search undefined, use counting first")
    if not 0 < m <= n:
        raise ValueError(f"m must be in [1, {n}], got {m}")
    theta = math.asin(math.sqrt(m / n))
    k0 = int(math.pi / (4.0 * theta))
    best_k, best_p = None, -1.0
    for k in range(max(k0 - 1, 0), k0 + 2):
        p = predicted_success(theta, k)
        if p > best_p:
            best_k, best_p = k, p
    return GroverPlan(iterations=best_k, theta=theta, predicted_success=best_p)


def grover_iteration(state: StateVector, oracle: OracleSpec) -> StateVector:
    """One Grover step: phase oracle, then inversion about the mean."""
    if state.n_qubits != oracle.n_qubits:
        raise ValueError(
            f"state has {state.n_qubits} qubits, oracle expects {oracle.n_qubits}"
        )
    amps = state.amps.copy()
    _backend.kernels.grover_step(amps, oracle.mask())
    return StateVector(state.n_qubits, amps)


def search(oracle: OracleSpec, iterations: int, rng_seed: int) -> MeasurementOutcome:
    """Uniform preparation, `iterations` Grover steps, one measurement."""
    if iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {iterations}")
    state = evolve(oracle, iterations)
    return qsim.measure_all(state, rng_seed)


def evolve(oracle: OracleSpec, iterations: int) -> StateVector:
    """The pre-measurement state of :func:`search` (exposed for analysis)."""
    state = qsim.init_uniform(oracle.n_qubits)
    amps = state.amps  # freshly allocated; safe to evolve in place
    mask = oracle.mask()
    step = _backend.kernels.grover_step
    for _ in range(iterations):
        step(amps, mask)
    return state


def marked_probability(state: StateVector, oracle: OracleSpec) -> float:
    """Total probability mass on the marked indices."""
    if state.n_qubits != oracle.n_qubits:
        raise ValueError(
            f"state has {state.n_qubits} qubits, oracle expects {oracle.n_qubits}"
        )
    return float(_backend.kernels.marked_mass(state.amps, oracle.mask()))
