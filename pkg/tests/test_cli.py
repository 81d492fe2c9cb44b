"""CLI verbs, scenario validation, and result-file determinism."""

import csv
import json
import shutil
import subprocess
from pathlib import Path

import pytest

from qsetsep import ResourceLimitError, cli

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _run(argv):
    return cli.main([str(a) for a in argv])


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


# --- validate ---------------------------------------------------------------

@pytest.mark.parametrize(
    "name",
    ["disjoint_tables.json", "intersection.json", "delay_velocity.json", "quantum_additive.json"],
)
def test_bundled_scenarios_validate(name):
    assert _run(["validate", SCENARIOS / name]) == 0


def test_priors_not_summing_reported_with_path(tmp_path, capsys):
    doc = _read_json(SCENARIOS / "disjoint_tables.json")
    doc["priors"] = {"0": 0.4, "1": 0.5}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert _run(["validate", path]) == 1
    out = capsys.readouterr().out
    assert "priors" in out and "sum" in out


def test_observation_outside_alphabet_reported(tmp_path, capsys):
    doc = _read_json(SCENARIOS / "disjoint_tables.json")
    doc["observations"] = [2, 99]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert _run(["validate", path]) == 1
    assert "observations[1]" in capsys.readouterr().out


def test_unknown_model_params_rejected(tmp_path, capsys):
    doc = _read_json(SCENARIOS / "intersection.json")
    doc["sets"][0]["params"]["bucket_widht"] = 2.0
    path = tmp_path / "typo.json"
    path.write_text(json.dumps(doc))
    assert _run(["validate", path]) == 1
    assert "bucket_widht" in capsys.readouterr().out


def test_delay_velocity_axis_params_validated(tmp_path, capsys):
    doc = _read_json(SCENARIOS / "delay_velocity.json")
    doc["sets"][0]["params"]["delay_axis"] = 5
    doc["sets"][1]["params"]["velocity_axis"] = 0
    path = tmp_path / "axes.json"
    path.write_text(json.dumps(doc))
    assert _run(["validate", path]) == 1
    out = capsys.readouterr().out
    assert "delay_axis" in out and "velocity_axis" in out


def test_quantum_mode_without_seed_rejected(tmp_path, capsys):
    doc = _read_json(SCENARIOS / "quantum_additive.json")
    del doc["seed"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert _run(["validate", path]) == 1
    assert "seed" in capsys.readouterr().out


def test_unreadable_scenario_is_a_clean_failure(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert _run(["validate", missing]) == 1
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert _run(["validate", garbled]) == 1
    assert _run(["run", garbled, "--out-dir", tmp_path / "r"]) == 1
    assert "not valid JSON" in capsys.readouterr().err


def test_all_violations_listed_at_once(tmp_path, capsys):
    doc = _read_json(SCENARIOS / "disjoint_tables.json")
    doc["observations"] = [2, 99]
    doc["rule"] = "GUESS"
    doc["priors"] = {"0": 0.4, "1": 0.5}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert _run(["validate", path]) == 1
    out = capsys.readouterr().out
    for needle in ("observations[1]", "rule", "priors"):
        assert needle in out


# --- run --------------------------------------------------------------------

def test_disjoint_scenario_assigns_everything(tmp_path):
    out = tmp_path / "results"
    assert _run(["run", SCENARIOS / "disjoint_tables.json", "--out-dir", out]) == 0
    report = _read_json(out / "results.json")
    verdicts = [rec["verdict"] for rec in report["decisions"]]
    assert verdicts == ["assigned"] * 6
    assigned = [rec["set_id"] for rec in report["decisions"]]
    assert assigned == [0, 0, 0, 1, 1, 1]


def test_intersection_scenario_structure(tmp_path):
    out = tmp_path / "results"
    assert _run(["run", SCENARIOS / "intersection.json", "--out-dir", out, "--curves"]) == 0
    report = _read_json(out / "results.json")
    by_obs = {rec["observation"]: rec for rec in report["decisions"]}
    # outer observations: the other set's likelihood is zero
    assert by_obs[4]["set_id"] == 0 and by_obs[4]["likelihoods"][1]["value"] == 0.0
    assert by_obs[9]["set_id"] == 1 and by_obs[9]["likelihoods"][0]["value"] == 0.0
    # overlap decided by the larger count
    assert by_obs[6]["set_id"] == 0
    assert by_obs[7]["set_id"] == 1
    # per-set curve files exist and normalize
    for sid in (0, 1):
        with open(out / f"curve_set{sid}.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert abs(sum(float(r["value"]) for r in rows) - 1.0) <= 1e-12


def test_rerun_is_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert _run(["run", SCENARIOS / "quantum_additive.json", "--out-dir", out, "--curves"]) == 0
    for name in ["results.json", "decisions.csv", "curve_set0.csv", "curve_set1.csv"]:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_run_rejects_invalid_scenario(tmp_path, capsys):
    doc = _read_json(SCENARIOS / "disjoint_tables.json")
    doc["sets"] = doc["sets"][:1]
    path = tmp_path / "one_set.json"
    path.write_text(json.dumps(doc))
    assert _run(["run", path, "--out-dir", tmp_path / "results"]) == 1
    assert "two sets" in capsys.readouterr().err


def test_resource_limit_maps_to_exit_two(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise ResourceLimitError("register of 30 qubits exceeds the 24-qubit limit")

    monkeypatch.setattr(cli, "separate", boom)
    code = _run(["run", SCENARIOS / "disjoint_tables.json", "--out-dir", tmp_path / "r"])
    assert code == 2


def test_oversized_quantum_register_caught_by_validation(tmp_path, capsys):
    doc = _read_json(SCENARIOS / "quantum_additive.json")
    doc["t_qubits"] = 23
    path = tmp_path / "big.json"
    path.write_text(json.dumps(doc))
    assert _run(["validate", path]) == 1
    assert "24-qubit limit" in capsys.readouterr().out


def test_tie_policy_lowest(tmp_path):
    doc = _read_json(SCENARIOS / "disjoint_tables.json")
    doc["sets"] = [
        {"set_id": 0, "model": "table", "params": {"symbols": [2, 2, 5, 9]}},
        {"set_id": 1, "model": "table", "params": {"symbols": [2, 2, 9, 5]}},
    ]
    doc["observations"] = [2]
    path = tmp_path / "tie.json"
    path.write_text(json.dumps(doc))

    out = tmp_path / "report"
    assert _run(["run", path, "--out-dir", out]) == 0
    rec = _read_json(out / "results.json")["decisions"][0]
    assert rec["verdict"] == "tie" and rec["tied"] == [0, 1] and rec["set_id"] is None

    out2 = tmp_path / "lowest"
    assert _run(["run", path, "--out-dir", out2, "--tie-policy", "lowest"]) == 0
    rec = _read_json(out2 / "results.json")["decisions"][0]
    assert rec["verdict"] == "assigned" and rec["set_id"] == 0 and rec["tie_broken"]


def test_table_model_from_file(tmp_path):
    (tmp_path / "set0.txt").write_text("2\n2\n5\n9\n")
    (tmp_path / "set1.txt").write_text("12\n12\n13\n14\n")
    doc = _read_json(SCENARIOS / "disjoint_tables.json")
    doc["sets"] = [
        {"set_id": 0, "model": "table", "params": {"path": "set0.txt"}},
        {"set_id": 1, "model": "table", "params": {"path": "set1.txt"}},
    ]
    path = tmp_path / "files.json"
    path.write_text(json.dumps(doc))
    out = tmp_path / "results"
    assert _run(["run", path, "--out-dir", out]) == 0
    report = _read_json(out / "results.json")
    assert [rec["set_id"] for rec in report["decisions"]] == [0, 0, 0, 1, 1, 1]


def test_mode_override_flag(tmp_path):
    out = tmp_path / "results"
    code = _run(
        ["run", SCENARIOS / "disjoint_tables.json", "--out-dir", out,
         "--mode", "quantum", "--seed", "11", "--repeats", "3"]
    )
    assert code == 0
    report = _read_json(out / "results.json")
    assert report["mode"] == "quantum"
    assert all(est["mode"] == "quantum" for rec in report["decisions"] for est in rec["likelihoods"])


# --- curve ------------------------------------------------------------------

def test_curve_verb_full_alphabet(tmp_path):
    out = tmp_path / "curves"
    assert _run(["curve", SCENARIOS / "intersection.json", "--out-dir", out]) == 0
    report = _read_json(out / "curves.json")
    for sid in ("0", "1"):
        assert len(report["curves"][sid]) == 16
        assert abs(sum(p["value"] for p in report["curves"][sid]) - 1.0) <= 1e-12


def test_curve_verb_symbol_subset(tmp_path):
    out = tmp_path / "curves"
    assert _run(["curve", SCENARIOS / "intersection.json", "--out-dir", out, "--symbols", "6", "7"]) == 0
    report = _read_json(out / "curves.json")
    assert [p["code"] for p in report["curves"]["0"]] == [6, 7]
    assert _run(["curve", SCENARIOS / "intersection.json", "--out-dir", out, "--symbols", "99"]) == 1


def test_exact_run_round_trips_the_separator_api(tmp_path):
    # the emitted report must equal direct library calls on the same scenario
    from qsetsep import Symbol, config, separate

    path = SCENARIOS / "intersection.json"
    out = tmp_path / "results"
    assert _run(["run", path, "--out-dir", out]) == 0
    report = _read_json(out / "results.json")

    scenario = config.parse(config.load_document(path), base_dir=path.parent)
    dbs = config.build_databases(scenario, base_dir=path.parent)
    for rec in report["decisions"]:
        decision = separate(dbs, Symbol(rec["observation"], scenario.alphabet_size))
        assert rec["verdict"] == decision.verdict.value
        assert rec["set_id"] == decision.set_id
        for got, est in zip(rec["likelihoods"], decision.likelihoods):
            assert got["value"] == est.value
            assert got["m_hat"] == est.m_hat


def test_bundled_scenarios_run_within_budget(tmp_path):
    import time

    for i, name in enumerate(sorted(SCENARIOS.glob("*.json"))):
        started = time.perf_counter()
        assert _run(["run", name, "--out-dir", tmp_path / str(i), "--curves"]) == 0
        assert time.perf_counter() - started < 60.0, name


def test_delay_velocity_counts_match_enumeration(tmp_path):
    # curve counts for the bundled channel equal a direct pass over the grid
    from qsetsep import Symbol, config, estimate_likelihood
    from qsetsep.vdb import index_to_params

    path = SCENARIOS / "delay_velocity.json"
    scenario = config.parse(config.load_document(path), base_dir=path.parent)
    for db in config.build_databases(scenario, base_dir=path.parent):
        enumerated = [0] * scenario.alphabet_size
        for x in range(db.grid.total_points):
            enumerated[db.model.eval(db.set_id, index_to_params(db.grid, x)).code] += 1
        for code, hits in enumerate(enumerated):
            est = estimate_likelihood(db, Symbol(code, scenario.alphabet_size))
            assert est.m_hat == hits
        assert sum(enumerated) == db.grid.total_points


def test_console_script_is_wired():
    exe = shutil.which("qsetsep")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run(
        [exe, "validate", str(SCENARIOS / "disjoint_tables.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
