"""Virtual database layer: quantized parameter grids, disturbance models,
the set-indexed evaluation function g(set, params), and oracle construction
from an observed symbol.

A database is never inverted, only evaluated forward and counted. Grids
rarely have a power-of-two size, so indices in [total_points, 2**n_qubits)
are padding: they evaluate to a reserved symbol in the extended alphabet
(code == alphabet_size) that can never equal an observation, and likelihood
denominators use total_points, not 2**n.
"""

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import qsim
from .errors import ModelContractError
from .grover import OracleSpec


@dataclass(frozen=True)
class ParamGrid:
    """Ordered axes of strictly increasing quantized parameter values.

    Index convention: mixed radix with axis 0 the least significant (axis 0
    varies fastest as the flat index increases).
    """

    axes: tuple[tuple[str, tuple[float, ...]], ...]

    def __post_init__(self):
        if not self.axes:
            raise ValueError("grid needs at least one axis")
        norm = []
        for name, values in self.axes:
            values = tuple(float(v) for v in values)
            if not values:
                raise ValueError(f"axis {name!r} is empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError(f"axis {name!r} values must be strictly increasing")
            norm.append((str(name), values))
        object.__setattr__(self, "axes", tuple(norm))

    @property
    def axis_sizes(self) -> tuple[int, ...]:
        return tuple(len(values) for _, values in self.axes)

    @property
    def total_points(self) -> int:
        return math.prod(self.axis_sizes)


def index_to_params(grid: ParamGrid, x: int) -> tuple[float, ...]:
    """Mixed-radix decomposition of x, least-significant axis first."""
    if not 0 <= x < grid.total_points:
        raise ValueError(f"index {x} out of range [0, {grid.total_points})")
    out = []
    for _, values in grid.axes:
        x, pos = divmod(x, len(values))
        out.append(values[pos])
    return tuple(out)


def params_to_index(grid: ParamGrid, params: Sequence[float]) -> int:
    """Inverse of :func:`index_to_params`; params must be exact grid values."""
    if len(params) != len(grid.axes):
        raise ValueError(f"expected {len(grid.axes)} parameters, got {len(params)}")
    x = 0
    stride = 1
    for value, (name, values) in zip(params, grid.axes):
        try:
            pos = values.index(float(value))
        except ValueError:
            raise ValueError(f"{value!r} is not a grid value of axis {name!r}") from None
        x += pos * stride
        stride *= len(values)
    return x


@dataclass(frozen=True)
class Symbol:
    """One letter of the finite quantized output alphabet."""

    code: int
    alphabet_size: int

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise ValueError("alphabet_size must be positive")
        if not 0 <= self.code < self.alphabet_size:
            raise ValueError(
                f"code {self.code} outside alphabet [0, {self.alphabet_size})"
            )


def padding_symbol(alphabet_size: int) -> Symbol:
    """The reserved never-matching symbol, one past the observation alphabet.

    It lives in the extended alphabet of size alphabet_size + 1, so it can
    never compare equal to any observable Symbol.
    """
    return Symbol(code=alphabet_size, alphabet_size=alphabet_size + 1)


class DisturbanceModel:
    """Deterministic quantized transfer function for one or more sets.

    Subclasses define `eval(set_id, params) -> Symbol`, total over every
    parameter tuple of the grid for every declared set_id. Subclasses may
    also provide `codes_for_grid(set_id, grid) -> int array` as a vectorized
    fast path; it must agree with `eval` pointwise (tested).
    """

    model_id: str
    alphabet_size: int

    def eval(self, set_id: int, params: tuple[float, ...]) -> Symbol:
        raise NotImplementedError

    def _symbol(self, code: int) -> Symbol:
        return Symbol(code=code, alphabet_size=self.alphabet_size)


def _quantize(value: float, bucket_width: float) -> int:
    # uniform quantization, half-up; configurable bucket width
    return math.floor(value / bucket_width + 0.5)


class AdditiveOffsetModel(DisturbanceModel):
    """y = clamp(round_half_up((mu_s + sum(params)) / bucket_width))."""

    model_id = "additive_offset"

    def __init__(self, mu: Mapping[int, float], alphabet_size: int, bucket_width: float = 1.0):
        if bucket_width <= 0:
            raise ValueError("bucket_width must be positive")
        self.mu = dict(mu)
        self.alphabet_size = int(alphabet_size)
        self.bucket_width = float(bucket_width)

    def eval(self, set_id, params):
        code = _quantize(self.mu[set_id] + sum(params), self.bucket_width)
        return self._symbol(min(max(code, 0), self.alphabet_size - 1))

    def codes_for_grid(self, set_id, grid):
        total = np.full(grid.total_points, self.mu[set_id])
        for values, stride, size in _axis_walk(grid):
            total += values[(np.arange(grid.total_points) // stride) % size]
        codes = np.floor(total / self.bucket_width + 0.5).astype(np.int64)
        return np.clip(codes, 0, self.alphabet_size - 1)


class DelayVelocityModel(DisturbanceModel):
    """Toy channel over (delay, velocity) parameter tuples.

    y = clamp(round_half_up(mu_s * velocity / bucket_width)
              + round_half_up(-log10(delay)))

    i.e. the source value scaled by velocity and quantized, then shifted by
    the delay's decade bucket. Delays must be positive; the first axis is
    the delay, the second the velocity (positions configurable).
    """

    model_id = "delay_velocity"

    def __init__(
        self,
        mu: Mapping[int, float],
        alphabet_size: int,
        bucket_width: float = 1.0,
        delay_axis: int = 0,
        velocity_axis: int = 1,
    ):
        if bucket_width <= 0:
            raise ValueError("bucket_width must be positive")
        if delay_axis == velocity_axis:
            raise ValueError("delay_axis and velocity_axis must differ")
        self.mu = dict(mu)
        self.alphabet_size = int(alphabet_size)
        self.bucket_width = float(bucket_width)
        self.delay_axis = int(delay_axis)
        self.velocity_axis = int(velocity_axis)

    def eval(self, set_id, params):
        delay = params[self.delay_axis]
        velocity = params[self.velocity_axis]
        if delay <= 0:
            raise ValueError(f"delay must be positive, got {delay}")
        code = _quantize(self.mu[set_id] * velocity, self.bucket_width)
        code += _quantize(-math.log10(delay), 1.0)
        return self._symbol(min(max(code, 0), self.alphabet_size - 1))

    def codes_for_grid(self, set_id, grid):
        idx = np.arange(grid.total_points)
        walk = list(_axis_walk(grid))
        values, stride, size = walk[self.delay_axis]
        delay = values[(idx // stride) % size]
        if np.any(delay <= 0):
            raise ValueError("delay must be positive")
        values, stride, size = walk[self.velocity_axis]
        velocity = values[(idx // stride) % size]
        codes = np.floor(self.mu[set_id] * velocity / self.bucket_width + 0.5)
        codes += np.floor(-np.log10(delay) + 0.5)
        return np.clip(codes.astype(np.int64), 0, self.alphabet_size - 1)


class TableModel(DisturbanceModel):
    """Explicit lookup: one symbol code per grid index."""

    model_id = "table"

    def __init__(
        self,
        symbols: Sequence[int],
        alphabet_size: int,
        grid: ParamGrid,
        set_ids: Sequence[int] | None = None,
    ):
        symbols = [int(s) for s in symbols]
        if len(symbols) != grid.total_points:
            raise ValueError(
                f"table has {len(symbols)} entries, grid has {grid.total_points} points"
            )
        self.symbols = symbols
        self.alphabet_size = int(alphabet_size)
        self.grid = grid
        self.set_ids = None if set_ids is None else frozenset(set_ids)

    def eval(self, set_id, params):
        if self.set_ids is not None and set_id not in self.set_ids:
            raise ValueError(f"set {set_id} not served by this table")
        return self._symbol(self.symbols[params_to_index(self.grid, params)])

    def codes_for_grid(self, set_id, grid):
        if self.set_ids is not None and set_id not in self.set_ids:
            raise ValueError(f"set {set_id} not served by this table")
        return np.asarray(self.symbols, dtype=np.int64)


def load_table_file(path) -> list[int]:
    """Read a table-model lookup file: one integer symbol per line."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not an integer: {line!r}") from None
    return out


_MODEL_FAMILIES = {
    AdditiveOffsetModel.model_id: AdditiveOffsetModel,
    DelayVelocityModel.model_id: DelayVelocityModel,
    TableModel.model_id: TableModel,
}


def builtin_models() -> list[str]:
    """The registered disturbance-model family ids."""
    return sorted(_MODEL_FAMILIES)


def make_model(model_id: str, **kwargs) -> DisturbanceModel:
    """Instantiate a builtin model family by id."""
    try:
        family = _MODEL_FAMILIES[model_id]
    except KeyError:
        raise ValueError(
            f"unknown model {model_id!r}; builtin: {builtin_models()}"
        ) from None
    return family(**kwargs)


@dataclass(eq=False)
class VirtualDb:
    """One set's database: a grid, a model, and a power-of-two index space."""

    set_id: int
    grid: ParamGrid
    model: DisturbanceModel
    n_qubits: int = 0  # 0 -> derived: smallest register covering the grid
    _codes: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.n_qubits == 0:
            self.n_qubits = max(1, math.ceil(math.log2(self.grid.total_points)))
        qsim.check_register_size(self.n_qubits)
        if (1 << self.n_qubits) < self.grid.total_points:
            raise ValueError(
                f"2**{self.n_qubits} register cannot index {self.grid.total_points} grid points"
            )

    @property
    def n_states(self) -> int:
        return 1 << self.n_qubits

    def symbol_codes(self) -> np.ndarray:
        """Codes for all 2**n indices (padding = alphabet_size), cached."""
        if self._codes is None:
            a = self.model.alphabet_size
            codes = np.full(self.n_states, a, dtype=np.int64)
            total = self.grid.total_points
            if hasattr(self.model, "codes_for_grid"):
                real = np.asarray(self.model.codes_for_grid(self.set_id, self.grid))
            else:
                real = np.fromiter(
                    (
                        self.model.eval(self.set_id, index_to_params(self.grid, x)).code
                        for x in range(total)
                    ),
                    np.int64,
                    count=total,
                )
            if real.shape != (total,):
                raise ModelContractError(
                    f"model {self.model.model_id!r} returned {real.shape} codes "
                    f"for {total} grid points"
                )
            if real.size and (real.min() < 0 or real.max() >= a):
                raise ModelContractError(
                    f"model {self.model.model_id!r} produced a code outside "
                    f"its alphabet [0, {a})"
                )
            codes[:total] = real
            self._codes = codes
        return self._codes


def evaluate(db: VirtualDb, x: int) -> Symbol:
    """g(set, x): the model's symbol for a real index, padding otherwise."""
    if not 0 <= x < db.n_states:
        raise ValueError(f"index {x} out of range [0, {db.n_states})")
    a = db.model.alphabet_size
    if x >= db.grid.total_points:
        return padding_symbol(a)
    sym = db.model.eval(db.set_id, index_to_params(db.grid, x))
    if not 0 <= sym.code < a:
        raise ModelContractError(
            f"model {db.model.model_id!r} produced code {sym.code} outside "
            f"its alphabet [0, {a})"
        )
    return sym


def match_oracle(db: VirtualDb, r: Symbol) -> OracleSpec:
    """Oracle marking the indices whose database entry equals observation r."""
    if r.alphabet_size != db.model.alphabet_size:
        raise ValueError(
            f"observation alphabet {r.alphabet_size} != model alphabet "
            f"{db.model.alphabet_size}"
        )
    mask = db.symbol_codes() == r.code
    return OracleSpec.from_mask(db.n_qubits, mask)


def _axis_walk(grid: ParamGrid):
    """(values array, stride, size) per axis, least-significant first."""
    stride = 1
    for _, values in grid.axes:
        arr = np.asarray(values)
        yield arr, stride, len(values)
        stride *= len(values)
