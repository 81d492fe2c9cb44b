"""Experiment runner.

Verbs:
  run       separate every observation of a scenario; write results
  validate  check a scenario document without executing it
  curve     sweep f(r|s) over symbols per set; write curve tables

Results are deterministic given the scenario seed: results.json and the
CSV tables are byte-identical across runs. Wall-clock timing and backend
info go to run_meta.json, which is excluded from that guarantee. Exit
codes: 0 success, 1 validation failure, 2 resource limit exceeded.
"""

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, config, qsim
from .errors import ResourceLimitError
from .separator import Decision, Verdict, pdf_curve, separate


@dataclass
class RunReport:
    """Everything `run` emits: per-observation decisions in input order,
    per-set curves when requested, and the register sizing that produced
    them. Fully deterministic given the scenario seed; wall-clock timing
    lives in the run_meta.json sidecar instead."""

    scenario: str
    mode: str
    rule: str
    seed: int | None
    tie_policy: str
    register: dict
    decisions: list[dict] = field(default_factory=list)
    curves: dict[str, list[dict]] | None = None

    def document(self) -> dict:
        doc = asdict(self)
        if self.curves is None:
            del doc["curves"]
        return doc


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsetsep",
        description="Quantum set separation over virtual databases.",
    )
    sub = parser.add_subparsers(required=True)

    run = sub.add_parser("run", help="separate the scenario's observations")
    _scenario_args(run)
    run.add_argument("--curves", action="store_true", help="also sweep per-set pdf curves")
    run.add_argument(
        "--tie-policy",
        choices=("report", "lowest"),
        default="report",
        help="report ties verbatim, or force-assign the lowest tied set_id",
    )
    run.set_defaults(func=_cmd_run)

    val = sub.add_parser("validate", help="check a scenario without running it")
    val.add_argument("scenario", type=Path)
    val.add_argument(
        "--for-curve", action="store_true", help="validate for the curve verb (one set suffices)"
    )
    val.set_defaults(func=_cmd_validate)

    curve = sub.add_parser("curve", help="sweep f(r|s) per set over the alphabet")
    _scenario_args(curve)
    curve.add_argument(
        "--symbols",
        type=int,
        nargs="+",
        default=None,
        help="symbol codes to sweep (default: the full alphabet)",
    )
    curve.set_defaults(func=_cmd_curve)
    return parser


def _scenario_args(sub) -> None:
    sub.add_argument("scenario", type=Path)
    sub.add_argument("--out-dir", type=Path, default=Path("results"))
    sub.add_argument("--mode", choices=config.MODES, default=None, help="override scenario mode")
    sub.add_argument("--rule", choices=config.RULES, default=None, help="override scenario rule")
    sub.add_argument("--repeats", type=int, default=None, help="override counting repeats")
    sub.add_argument("--t-qubits", type=int, default=None, help="override counting register size")
    sub.add_argument("--seed", type=int, default=None, help="override scenario seed")


def _read_document(path):
    try:
        return config.load_document(path)
    except OSError as exc:
        print(f"invalid: {path}: {exc}", file=sys.stderr)
    except json.JSONDecodeError as exc:
        print(f"invalid: {path}: not valid JSON ({exc})", file=sys.stderr)
    return None


def _load(args, *, require_decision: bool):
    doc = _read_document(args.scenario)
    if doc is None:
        return None, None, None
    base_dir = args.scenario.parent
    overrides = {
        key: value
        for key, value in (
            ("mode", args.mode),
            ("rule", args.rule),
            ("repeats", args.repeats),
            ("t_qubits", args.t_qubits),
            ("seed", args.seed),
        )
        if value is not None
    }
    doc = {**doc, **overrides}
    issues = config.validate(doc, base_dir=base_dir, require_decision=require_decision)
    if issues:
        for issue in issues:
            print(f"invalid: {issue}", file=sys.stderr)
        return None, None, None
    scenario = config.parse(doc, base_dir=base_dir, require_decision=require_decision)
    dbs = config.build_databases(scenario, base_dir=base_dir)
    return doc, scenario, dbs


def _cmd_validate(args) -> int:
    doc = _read_document(args.scenario)
    if doc is None:
        return 1
    issues = config.validate(
        doc, base_dir=args.scenario.parent, require_decision=not args.for_curve
    )
    if issues:
        for issue in issues:
            print(f"invalid: {issue}")
        return 1
    print(f"{args.scenario}: valid")
    return 0


def _cmd_run(args) -> int:
    _, scenario, dbs = _load(args, require_decision=True)
    if scenario is None:
        return 1
    started = time.perf_counter()
    decisions = []
    for i, r in enumerate(scenario.observation_symbols()):
        obs_seed = None if scenario.seed is None else scenario.seed + i
        decision = separate(
            dbs,
            r,
            mode=scenario.mode,
            rule=scenario.rule,
            priors=scenario.priors_obj(),
            t_qubits=scenario.t_qubits,
            repeats=scenario.repeats,
            rng_seed=obs_seed,
        )
        decisions.append(_decision_record(r.code, decision, args.tie_policy))
    curves = _sweep_curves(scenario, dbs) if args.curves else None
    elapsed = time.perf_counter() - started

    report = RunReport(
        scenario=scenario.name,
        mode=scenario.mode,
        rule=scenario.rule,
        seed=scenario.seed,
        tie_policy=args.tie_policy,
        register={
            "n_qubits": scenario.derived_n_qubits(),
            "t_qubits": scenario.default_t_qubits() if scenario.mode == "quantum" else None,
            "repeats": scenario.repeats if scenario.mode == "quantum" else None,
            "total_points": scenario.grid.total_points,
        },
        decisions=decisions,
        curves=curves,
    )
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "results.json", report.document())
    _write_decisions_csv(out / "decisions.csv", decisions, sorted(db.set_id for db in dbs))
    if curves is not None:
        for sid, rows in curves.items():
            _write_curve_csv(out / f"curve_set{sid}.csv", rows)
    _write_json(
        out / "run_meta.json",
        {
            "elapsed_seconds": elapsed,
            "kernel_backend": qsim.backend_name(),
            "version": __version__,
        },
    )
    print(f"{len(decisions)} observation(s) -> {out / 'results.json'}")
    return 0


def _cmd_curve(args) -> int:
    _, scenario, dbs = _load(args, require_decision=False)
    if scenario is None:
        return 1
    if args.symbols is not None:
        bad = [c for c in args.symbols if not 0 <= c < scenario.alphabet_size]
        if bad:
            print(
                f"invalid: --symbols {bad} outside alphabet [0, {scenario.alphabet_size})",
                file=sys.stderr,
            )
            return 1
    started = time.perf_counter()
    curves = _sweep_curves(scenario, dbs, codes=args.symbols)
    elapsed = time.perf_counter() - started

    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    report = {
        "scenario": scenario.name,
        "mode": scenario.mode,
        "seed": scenario.seed,
        "curves": curves,
    }
    _write_json(out / "curves.json", report)
    for sid, rows in curves.items():
        _write_curve_csv(out / f"curve_set{sid}.csv", rows)
    _write_json(
        out / "run_meta.json",
        {
            "elapsed_seconds": elapsed,
            "kernel_backend": qsim.backend_name(),
            "version": __version__,
        },
    )
    print(f"{len(curves)} curve(s) -> {out / 'curves.json'}")
    return 0


def _sweep_curves(scenario, dbs, codes=None):
    if codes is None:
        symbols = scenario.alphabet_symbols()
    else:
        symbols = [s for s in scenario.alphabet_symbols() if s.code in set(codes)]
    curves = {}
    for i, db in enumerate(dbs):
        curve_seed = None if scenario.seed is None else scenario.seed + 100_003 * (i + 1)
        points = pdf_curve(
            db,
            symbols,
            mode=scenario.mode,
            t_qubits=scenario.t_qubits,
            repeats=scenario.repeats,
            rng_seed=curve_seed,
        )
        curves[str(db.set_id)] = [
            {
                "code": r.code,
                "value": est.value,
                "m_hat": est.m_hat,
                "denominator": est.denominator,
                "error_bound": est.error_bound,
                "mode": est.mode,
            }
            for r, est in points
        ]
    return curves


def _decision_record(code: int, decision: Decision, tie_policy: str) -> dict:
    verdict = decision.verdict
    set_id = decision.set_id
    tie_broken = False
    if verdict is Verdict.TIE and tie_policy == "lowest":
        verdict = Verdict.ASSIGNED
        set_id = min(decision.tied)
        tie_broken = True
    return {
        "observation": code,
        "verdict": verdict.value,
        "set_id": set_id,
        "tied": None if decision.tied is None else list(decision.tied),
        "tie_broken": tie_broken,
        "within_error_bound": decision.within_error_bound,
        "posteriors": decision.posteriors
        and {str(k): v for k, v in decision.posteriors.items()},
        "likelihoods": [
            {
                "set_id": est.set_id,
                "value": est.value,
                "m_hat": est.m_hat,
                "denominator": est.denominator,
                "mode": est.mode,
                "error_bound": est.error_bound,
            }
            for est in decision.likelihoods
        ],
    }


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_decisions_csv(path: Path, decisions, set_ids) -> None:
    header = ["observation", "verdict", "set_id", "tied", "tie_broken", "within_error_bound"]
    for sid in set_ids:
        header += [f"f_{sid}", f"error_bound_{sid}"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for rec in decisions:
            by_id = {est["set_id"]: est for est in rec["likelihoods"]}
            row = [
                rec["observation"],
                rec["verdict"],
                "" if rec["set_id"] is None else rec["set_id"],
                "" if rec["tied"] is None else ";".join(map(str, rec["tied"])),
                rec["tie_broken"],
                rec["within_error_bound"],
            ]
            for sid in set_ids:
                est = by_id[sid]
                row += [repr(est["value"]), repr(est["error_bound"])]
            writer.writerow(row)


def _write_curve_csv(path: Path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["code", "value", "m_hat", "denominator", "error_bound", "mode"])
        for row in rows:
            writer.writerow(
                [
                    row["code"],
                    repr(row["value"]),
                    repr(row["m_hat"]),
                    row["denominator"],
                    repr(row["error_bound"]),
                    row["mode"],
                ]
            )


if __name__ == "__main__":
    sys.exit(main())
