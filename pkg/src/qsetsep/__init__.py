"""Quantum set separation toolkit.

Builds virtual databases from quantized disturbance parameters, counts
matches to an observed symbol with Grover-based quantum counting (simulated
exactly on a dense state vector), and classifies the observation with
ML/MAP decision rules.
"""

__version__ = "0.1.0"

from .errors import ModelContractError, ResourceLimitError
from .grover import GroverPlan, OracleSpec
from .qcount import CountEstimate, counting_register_size, exact_count, quantum_count
from .separator import (
    Decision,
    LikelihoodEstimate,
    Priors,
    Verdict,
    estimate_likelihood,
    map_decide,
    ml_decide,
    pdf_curve,
    separate,
)
from .vdb import (
    DisturbanceModel,
    ParamGrid,
    Symbol,
    VirtualDb,
    builtin_models,
    evaluate,
    index_to_params,
    make_model,
    match_oracle,
    padding_symbol,
    params_to_index,
)

__all__ = [
    "CountEstimate",
    "Decision",
    "DisturbanceModel",
    "GroverPlan",
    "LikelihoodEstimate",
    "ModelContractError",
    "OracleSpec",
    "ParamGrid",
    "Priors",
    "ResourceLimitError",
    "Symbol",
    "Verdict",
    "VirtualDb",
    "builtin_models",
    "counting_register_size",
    "estimate_likelihood",
    "evaluate",
    "exact_count",
    "index_to_params",
    "make_model",
    "map_decide",
    "match_oracle",
    "ml_decide",
    "padding_symbol",
    "params_to_index",
    "pdf_curve",
    "quantum_count",
    "separate",
]
