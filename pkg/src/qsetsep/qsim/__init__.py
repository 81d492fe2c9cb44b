"""Exact dense state-vector simulator: registers, gates, oracles, QFT,
Born-rule measurement. See `statevector` for the conventions."""

from ._backend import available_backends, backend_name, set_backend
from .statevector import (
    MAX_QUBITS,
    MeasurementOutcome,
    StateVector,
    apply_cphase,
    apply_diffusion,
    apply_hadamard,
    apply_inverse_qft,
    apply_phase_oracle,
    apply_qft,
    apply_swap,
    as_mask,
    basis_state,
    check_register_size,
    init_uniform,
    measure_all,
    states_equal,
)

__all__ = [
    "MAX_QUBITS",
    "MeasurementOutcome",
    "StateVector",
    "apply_cphase",
    "apply_diffusion",
    "apply_hadamard",
    "apply_inverse_qft",
    "apply_phase_oracle",
    "apply_qft",
    "apply_swap",
    "as_mask",
    "available_backends",
    "backend_name",
    "basis_state",
    "check_register_size",
    "init_uniform",
    "measure_all",
    "set_backend",
    "states_equal",
]
