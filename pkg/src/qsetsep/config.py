"""Scenario configuration: parsing, validation, and database construction.

A scenario is a single JSON document; the exact field names are frozen in
docs/formats.md. Validation reports every violated constraint with the
config path of the offending value, without executing anything.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import qsim
from .qcount import counting_register_size
from .separator import Priors
from .vdb import (
    ParamGrid,
    Symbol,
    VirtualDb,
    builtin_models,
    load_table_file,
    make_model,
)

MODES = ("exact", "quantum")
RULES = ("ML", "MAP")

_KNOWN_PARAMS = {
    "additive_offset": {"bucket_width"},
    "delay_velocity": {"bucket_width", "delay_axis", "velocity_axis"},
    "table": {"symbols", "path"},
}


@dataclass(frozen=True)
class ValidationIssue:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


@dataclass
class SetSpec:
    set_id: int
    model_id: str
    mu: float | None = None
    params: dict = field(default_factory=dict)


@dataclass
class Scenario:
    """A parsed, validated experiment description."""

    name: str
    grid: ParamGrid
    alphabet_size: int
    sets: list[SetSpec]
    observations: list[int]
    mode: str = "exact"
    rule: str = "ML"
    priors: dict[int, float] | None = None
    t_qubits: int | None = None
    repeats: int = 5
    seed: int | None = None
    n_qubits: int | None = None

    def priors_obj(self) -> Priors | None:
        return None if self.priors is None else Priors(self.priors)

    def observation_symbols(self) -> list[Symbol]:
        return [Symbol(code, self.alphabet_size) for code in self.observations]

    def alphabet_symbols(self) -> list[Symbol]:
        return [Symbol(code, self.alphabet_size) for code in range(self.alphabet_size)]

    def derived_n_qubits(self) -> int:
        if self.n_qubits is not None:
            return self.n_qubits
        return max(1, math.ceil(math.log2(self.grid.total_points)))

    def default_t_qubits(self) -> int:
        if self.t_qubits is not None:
            return self.t_qubits
        return counting_register_size(self.derived_n_qubits(), 0.125)


def load_document(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def validate(doc, *, base_dir=".", require_decision: bool = True) -> list[ValidationIssue]:
    """Full constraint check of a config document; empty list means valid.

    `require_decision` demands >= 2 sets (run); the curve verb accepts one.
    """
    issues: list[ValidationIssue] = []

    def bad(path, message):
        issues.append(ValidationIssue(path, message))

    if not isinstance(doc, dict):
        return [ValidationIssue("$", "config must be a JSON object")]

    grid, grid_issues = _parse_grid(doc.get("grid"))
    issues.extend(grid_issues)

    alphabet = doc.get("alphabet_size")
    if not isinstance(alphabet, int) or isinstance(alphabet, bool) or alphabet < 1:
        bad("alphabet_size", f"must be a positive integer, got {alphabet!r}")
        alphabet = None

    sets = doc.get("sets")
    set_ids: list[int] = []
    if not isinstance(sets, list) or not sets:
        bad("sets", "must be a non-empty list")
        sets = []
    if require_decision and isinstance(sets, list) and len(sets) == 1:
        bad("sets", "separation needs at least two sets")
    for i, spec in enumerate(sets):
        prefix = f"sets[{i}]"
        if not isinstance(spec, dict):
            bad(prefix, "must be an object")
            continue
        sid = spec.get("set_id")
        if not isinstance(sid, int) or isinstance(sid, bool) or sid < 0:
            bad(f"{prefix}.set_id", f"must be a nonnegative integer, got {sid!r}")
        else:
            set_ids.append(sid)
        model_id = spec.get("model")
        if model_id not in builtin_models():
            bad(f"{prefix}.model", f"unknown model {model_id!r}; builtin: {builtin_models()}")
            continue
        params = spec.get("params", {})
        if not isinstance(params, dict):
            bad(f"{prefix}.params", "must be an object")
            params = {}
        known = _KNOWN_PARAMS[model_id]
        for key in sorted(set(params) - known):
            bad(f"{prefix}.params.{key}", f"unknown parameter for model {model_id!r}; known: {sorted(known)}")
        if model_id == "table":
            issues.extend(_validate_table(spec, params, prefix, grid, alphabet, base_dir))
        else:
            if not isinstance(spec.get("mu"), (int, float)) or isinstance(spec.get("mu"), bool):
                bad(f"{prefix}.mu", f"model {model_id!r} needs a numeric mu")
            width = params.get("bucket_width", 1.0)
            if not isinstance(width, (int, float)) or isinstance(width, bool) or width <= 0:
                bad(f"{prefix}.params.bucket_width", f"must be positive, got {width!r}")
        if model_id == "delay_velocity" and grid is not None:
            issues.extend(_validate_delay_velocity(params, prefix, grid))
    if len(set_ids) != len(set(set_ids)):
        bad("sets", f"set_ids must be distinct, got {set_ids}")

    observations = doc.get("observations")
    if not isinstance(observations, list) or not observations:
        bad("observations", "must be a non-empty list")
    else:
        for i, code in enumerate(observations):
            if not isinstance(code, int) or isinstance(code, bool) or code < 0:
                bad(f"observations[{i}]", f"must be a nonnegative integer, got {code!r}")
            elif alphabet is not None and code >= alphabet:
                bad(f"observations[{i}]", f"symbol {code} outside alphabet [0, {alphabet})")

    mode = doc.get("mode", "exact")
    if mode not in MODES:
        bad("mode", f"must be one of {MODES}, got {mode!r}")
    rule = doc.get("rule", "ML")
    if rule not in RULES:
        bad("rule", f"must be one of {RULES}, got {rule!r}")

    priors = doc.get("priors")
    if priors is not None:
        if not isinstance(priors, dict):
            bad("priors", "must map set_id -> probability")
        else:
            try:
                keys = {int(k) for k in priors}
            except (TypeError, ValueError):
                bad("priors", "keys must be integer set_ids")
                keys = None
            if keys is not None and set_ids and keys != set(set_ids):
                bad("priors", f"must cover exactly the set_ids {sorted(set(set_ids))}")
            values = list(priors.values())
            if any(not isinstance(v, (int, float)) or isinstance(v, bool) or v < 0 for v in values):
                bad("priors", "probabilities must be nonnegative numbers")
            elif abs(math.fsum(values) - 1.0) > 1e-12:
                bad("priors", f"must sum to 1 within 1e-12, got {math.fsum(values)!r}")

    n_override = doc.get("n_qubits")
    n_qubits = None
    if n_override is not None:
        if not isinstance(n_override, int) or isinstance(n_override, bool) or n_override < 1:
            bad("n_qubits", f"must be a positive integer, got {n_override!r}")
        elif grid is not None and (1 << n_override) < grid.total_points:
            bad("n_qubits", f"2**{n_override} cannot index {grid.total_points} grid points")
        else:
            n_qubits = n_override
    if n_qubits is None and grid is not None:
        n_qubits = max(1, math.ceil(math.log2(grid.total_points)))
    if n_qubits is not None and n_qubits > qsim.MAX_QUBITS:
        bad("grid", f"needs {n_qubits} qubits, over the {qsim.MAX_QUBITS}-qubit limit")

    repeats = doc.get("repeats", 5)
    if not isinstance(repeats, int) or isinstance(repeats, bool) or repeats < 1:
        bad("repeats", f"must be a positive integer, got {repeats!r}")

    t_qubits = doc.get("t_qubits")
    if t_qubits is not None and (
        not isinstance(t_qubits, int) or isinstance(t_qubits, bool) or t_qubits < 1
    ):
        bad("t_qubits", f"must be a positive integer, got {t_qubits!r}")

    seed = doc.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or seed < 0):
        bad("seed", f"must be a nonnegative integer, got {seed!r}")

    if mode == "quantum":
        if seed is None:
            bad("seed", "quantum mode requires an explicit seed")
        if n_qubits is not None and isinstance(t_qubits, int):
            if n_qubits + t_qubits > qsim.MAX_QUBITS:
                bad(
                    "t_qubits",
                    f"n+t = {n_qubits + t_qubits} exceeds the {qsim.MAX_QUBITS}-qubit limit",
                )
        elif n_qubits is not None and t_qubits is None:
            t_default = counting_register_size(n_qubits, 0.125)
            if n_qubits + t_default > qsim.MAX_QUBITS:
                bad(
                    "t_qubits",
                    f"default counting register (t={t_default}) would need "
                    f"{n_qubits + t_default} qubits, over the {qsim.MAX_QUBITS}-qubit "
                    "limit; set t_qubits explicitly",
                )

    return issues


def parse(doc: dict, *, base_dir=".", require_decision: bool = True) -> Scenario:
    """Validate and build a Scenario; raises ValueError listing all issues."""
    issues = validate(doc, base_dir=base_dir, require_decision=require_decision)
    if issues:
        raise ValueError(
            "invalid scenario:\n" + "\n".join(f"  {issue}" for issue in issues)
        )
    grid, _ = _parse_grid(doc["grid"])
    sets = [
        SetSpec(
            set_id=spec["set_id"],
            model_id=spec["model"],
            mu=spec.get("mu"),
            params=dict(spec.get("params", {})),
        )
        for spec in doc["sets"]
    ]
    priors = doc.get("priors")
    return Scenario(
        name=str(doc.get("name", "scenario")),
        grid=grid,
        alphabet_size=doc["alphabet_size"],
        sets=sets,
        observations=list(doc["observations"]),
        mode=doc.get("mode", "exact"),
        rule=doc.get("rule", "ML"),
        priors=None if priors is None else {int(k): float(v) for k, v in priors.items()},
        t_qubits=doc.get("t_qubits"),
        repeats=doc.get("repeats", 5),
        seed=doc.get("seed"),
        n_qubits=doc.get("n_qubits"),
    )


def build_databases(scenario: Scenario, *, base_dir=".") -> list[VirtualDb]:
    n_qubits = scenario.derived_n_qubits()
    dbs = []
    for spec in scenario.sets:
        kwargs = dict(spec.params)
        if spec.model_id == "table":
            symbols = kwargs.pop("symbols", None)
            path = kwargs.pop("path", None)
            if symbols is None:
                symbols = load_table_file(Path(base_dir) / path)
            model = make_model(
                "table",
                symbols=symbols,
                alphabet_size=scenario.alphabet_size,
                grid=scenario.grid,
                **kwargs,
            )
        else:
            model = make_model(
                spec.model_id,
                mu={spec.set_id: spec.mu},
                alphabet_size=scenario.alphabet_size,
                **kwargs,
            )
        dbs.append(
            VirtualDb(
                set_id=spec.set_id,
                grid=scenario.grid,
                model=model,
                n_qubits=n_qubits,
            )
        )
    return dbs


def _parse_grid(raw) -> tuple[ParamGrid | None, list[ValidationIssue]]:
    issues: list[ValidationIssue] = []
    if not isinstance(raw, dict) or not isinstance(raw.get("axes"), list) or not raw.get("axes"):
        return None, [ValidationIssue("grid.axes", "must be a non-empty list of axes")]
    axes = []
    for i, axis in enumerate(raw["axes"]):
        path = f"grid.axes[{i}]"
        if not isinstance(axis, dict):
            issues.append(ValidationIssue(path, "must be an object with name and values"))
            continue
        name = axis.get("name", f"axis{i}")
        values = axis.get("values")
        if not isinstance(values, list) or not values:
            issues.append(ValidationIssue(f"{path}.values", "must be a non-empty list"))
            continue
        if any(not isinstance(v, (int, float)) or isinstance(v, bool) for v in values):
            issues.append(ValidationIssue(f"{path}.values", "must all be numbers"))
            continue
        if any(b <= a for a, b in zip(values, values[1:])):
            issues.append(ValidationIssue(f"{path}.values", "must be strictly increasing"))
            continue
        axes.append((str(name), tuple(float(v) for v in values)))
    if issues:
        return None, issues
    return ParamGrid(tuple(axes)), []


def _validate_delay_velocity(params, prefix, grid) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []
    if len(grid.axes) < 2:
        return [ValidationIssue(f"{prefix}.model", "delay_velocity needs a grid with >= 2 axes")]
    axes = {}
    for key, default in (("delay_axis", 0), ("velocity_axis", 1)):
        pos = params.get(key, default)
        if not isinstance(pos, int) or isinstance(pos, bool) or not 0 <= pos < len(grid.axes):
            issues.append(
                ValidationIssue(f"{prefix}.params.{key}", f"must be an axis index in [0, {len(grid.axes)}), got {pos!r}")
            )
        else:
            axes[key] = pos
    if len(axes) == 2 and axes["delay_axis"] == axes["velocity_axis"]:
        issues.append(
            ValidationIssue(f"{prefix}.params.velocity_axis", "must differ from delay_axis")
        )
    if "delay_axis" in axes and any(v <= 0 for v in grid.axes[axes["delay_axis"]][1]):
        issues.append(ValidationIssue("grid.axes", "delay_velocity needs positive delay values"))
    return issues


def _validate_table(spec, params, prefix, grid, alphabet, base_dir) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []
    symbols = params.get("symbols")
    path = params.get("path")
    if symbols is None and path is None:
        return [
            ValidationIssue(
                f"{prefix}.params", "table model needs 'symbols' (inline) or 'path' (file)"
            )
        ]
    if symbols is not None and not isinstance(symbols, list):
        return [ValidationIssue(f"{prefix}.params.symbols", "must be a list of integers")]
    if symbols is None:
        try:
            symbols = load_table_file(Path(base_dir) / path)
        except (OSError, ValueError) as exc:
            return [ValidationIssue(f"{prefix}.params.path", str(exc))]
    for j, code in enumerate(symbols):
        if not isinstance(code, int) or isinstance(code, bool) or code < 0:
            issues.append(
                ValidationIssue(f"{prefix}.params.symbols[{j}]", f"must be a nonnegative integer, got {code!r}")
            )
        elif alphabet is not None and code >= alphabet:
            issues.append(
                ValidationIssue(f"{prefix}.params.symbols[{j}]", f"code {code} outside alphabet [0, {alphabet})")
            )
    if grid is not None and len(symbols) != grid.total_points:
        issues.append(
            ValidationIssue(
                f"{prefix}.params.symbols",
                f"table has {len(symbols)} entries, grid has {grid.total_points} points",
            )
        )
    return issues
