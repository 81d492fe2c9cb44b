"""Virtual databases: grids, models, padding, and oracle construction."""

import numpy as np
import pytest

from qsetsep import (
    ModelContractError,
    ParamGrid,
    Symbol,
    VirtualDb,
    builtin_models,
    evaluate,
    exact_count,
    index_to_params,
    make_model,
    match_oracle,
    padding_symbol,
    params_to_index,
)
from qsetsep.vdb import (
    AdditiveOffsetModel,
    DelayVelocityModel,
    DisturbanceModel,
    TableModel,
    load_table_file,
)


GRID_23 = ParamGrid((("a", (10.0, 20.0)), ("b", (1.0, 2.0, 3.0))))


# --- grid indexing ----------------------------------------------------------

def test_index_zero_maps_to_first_values():
    assert index_to_params(GRID_23, 0) == (10.0, 1.0)


def test_mixed_radix_least_significant_axis_first():
    # 5 = 1 + 2*2 -> axis0 position 1, axis1 position 2
    assert index_to_params(GRID_23, 5) == (20.0, 3.0)


def test_round_trip_exhaustive():
    grid = ParamGrid(
        (
            ("x", tuple(float(v) for v in range(4))),
            ("y", tuple(float(v) for v in range(10, 15))),
            ("z", tuple(float(v) for v in range(20, 26))),
        )
    )
    assert grid.total_points == 120
    for x in range(120):
        assert params_to_index(grid, index_to_params(grid, x)) == x


def test_grid_validation():
    with pytest.raises(ValueError):
        ParamGrid(())
    with pytest.raises(ValueError):
        ParamGrid((("a", ()),))
    with pytest.raises(ValueError):
        ParamGrid((("a", (1.0, 1.0)),))
    with pytest.raises(ValueError):
        index_to_params(GRID_23, 6)
    with pytest.raises(ValueError):
        params_to_index(GRID_23, (10.0, 9.0))


# --- symbols and padding ----------------------------------------------------

def test_symbol_range_checked():
    Symbol(15, 16)
    with pytest.raises(ValueError):
        Symbol(16, 16)
    with pytest.raises(ValueError):
        Symbol(-1, 16)


def test_padding_symbol_never_equals_an_observation():
    pad = padding_symbol(8)
    assert all(pad != Symbol(code, 8) for code in range(8))


# --- evaluate ---------------------------------------------------------------

def test_constant_table_model():
    grid = ParamGrid((("i", (0.0, 1.0, 2.0, 3.0)),))
    db = VirtualDb(0, grid, TableModel([7, 7, 7, 7], 16, grid))
    assert all(evaluate(db, x).code == 7 for x in range(4))


def test_table_lookup_exact_entries():
    grid = ParamGrid((("i", (0.0, 1.0, 2.0, 3.0)),))
    db = VirtualDb(0, grid, TableModel([2, 2, 5, 9], 16, grid))
    assert [evaluate(db, x).code for x in range(4)] == [2, 2, 5, 9]


def test_padding_indices_return_reserved_symbol():
    grid = ParamGrid((("i", (0.0, 1.0, 2.0)),))
    db = VirtualDb(0, grid, TableModel([1, 2, 3], 8, grid))
    assert db.n_states == 4
    assert evaluate(db, 3) == padding_symbol(8)


def test_additive_model_hand_checked():
    # mu=10 over offsets {-1, 0, 1} -> symbols 9, 10, 11
    grid = ParamGrid((("offset", (-1.0, 0.0, 1.0)),))
    db = VirtualDb(0, grid, AdditiveOffsetModel({0: 10.0}, alphabet_size=16))
    assert [evaluate(db, x).code for x in range(3)] == [9, 10, 11]


def test_additive_model_with_zero_offset_is_identity():
    grid = ParamGrid((("offset", (0.0,)),))
    db = VirtualDb(0, grid, AdditiveOffsetModel({0: 6.0}, alphabet_size=16))
    assert evaluate(db, 0).code == 6


def test_delay_velocity_formula():
    model = DelayVelocityModel({0: 2.0}, alphabet_size=32, bucket_width=1.0)
    # code = round(mu*v) + round(-log10(d))
    assert model.eval(0, (1e-3, 4.0)).code == 8 + 3
    assert model.eval(0, (1e-1, 1.0)).code == 2 + 1
    with pytest.raises(ValueError):
        model.eval(0, (0.0, 1.0))


def test_model_contract_violation_detected():
    class Broken(DisturbanceModel):
        model_id = "broken"
        alphabet_size = 4

        def eval(self, set_id, params):
            return Symbol(9, 16)  # outside the declared alphabet of 4

    grid = ParamGrid((("i", (0.0, 1.0)),))
    db = VirtualDb(0, grid, Broken())
    with pytest.raises(ModelContractError):
        evaluate(db, 0)
    with pytest.raises(ModelContractError):
        db.symbol_codes()


def test_evaluate_index_bounds():
    grid = ParamGrid((("i", (0.0, 1.0, 2.0)),))
    db = VirtualDb(0, grid, TableModel([1, 2, 3], 8, grid))
    with pytest.raises(ValueError):
        evaluate(db, 4)
    with pytest.raises(ValueError):
        evaluate(db, -1)


# --- match_oracle -----------------------------------------------------------

def test_constant_model_marks_whole_grid():
    grid = ParamGrid((("i", tuple(float(v) for v in range(5))),))
    db = VirtualDb(0, grid, TableModel([7] * 5, 16, grid))
    assert exact_count(match_oracle(db, Symbol(7, 16))).m_hat == 5


def test_unreachable_observation_marks_nothing():
    grid = ParamGrid((("i", (0.0, 1.0, 2.0, 3.0)),))
    db = VirtualDb(0, grid, TableModel([2, 2, 5, 9], 16, grid))
    assert exact_count(match_oracle(db, Symbol(8, 16))).m_hat == 0


def test_match_counts_equal_direct_enumeration(rng):
    grid = ParamGrid(
        (("u", tuple(float(v) for v in range(8))), ("v", tuple(float(v) for v in range(7))))
    )
    symbols = rng.integers(0, 10, size=56).tolist()
    db = VirtualDb(0, grid, TableModel(symbols, 10, grid))
    for code in range(10):
        direct = sum(1 for s in symbols if s == code)
        assert exact_count(match_oracle(db, Symbol(code, 10))).m_hat == direct


def test_padding_never_marked():
    grid = ParamGrid((("i", (0.0, 1.0, 2.0)),))
    db = VirtualDb(0, grid, TableModel([1, 2, 3], 8, grid))
    for code in range(8):
        mask = match_oracle(db, Symbol(code, 8)).mask()
        assert not mask[3:].any()


def test_alphabet_mismatch_rejected():
    grid = ParamGrid((("i", (0.0, 1.0)),))
    db = VirtualDb(0, grid, TableModel([1, 2], 8, grid))
    with pytest.raises(ValueError):
        match_oracle(db, Symbol(1, 16))


# --- invariants -------------------------------------------------------------

def test_evaluation_is_deterministic():
    grid = ParamGrid((("offset", (-2.0, -1.0, 0.0, 1.0, 2.0)),))
    db = VirtualDb(0, grid, AdditiveOffsetModel({0: 5.0}, alphabet_size=16))
    first = [evaluate(db, x) for x in range(db.n_states)]
    second = [evaluate(db, x) for x in range(db.n_states)]
    assert first == second


def test_symbols_partition_the_grid(rng):
    for _ in range(5):
        alphabet = int(rng.integers(4, 12))
        grid = ParamGrid((("i", tuple(float(v) for v in range(int(rng.integers(3, 30))))),))
        symbols = rng.integers(0, alphabet, size=grid.total_points).tolist()
        db = VirtualDb(0, grid, TableModel(symbols, alphabet, grid))
        total = sum(
            int(exact_count(match_oracle(db, Symbol(code, alphabet))).m_hat)
            for code in range(alphabet)
        )
        assert total == grid.total_points


def test_vectorized_codes_match_scalar_eval():
    grid = ParamGrid(
        (
            ("delay", (1e-4, 1e-3, 1e-2, 1e-1)),
            ("velocity", (1.0, 2.5, 4.0)),
        )
    )
    models = [
        AdditiveOffsetModel({0: 3.0}, alphabet_size=32, bucket_width=0.5),
        DelayVelocityModel({0: 1.5}, alphabet_size=32),
        TableModel(list(range(12)), 32, grid),
    ]
    for model in models:
        db = VirtualDb(0, grid, model)
        scalar = [model.eval(0, index_to_params(grid, x)).code for x in range(12)]
        np.testing.assert_array_equal(db.symbol_codes()[:12], scalar)


# --- registry and table files -----------------------------------------------

def test_builtin_model_registry():
    assert builtin_models() == ["additive_offset", "delay_velocity", "table"]
    with pytest.raises(ValueError):
        make_model("nope")


def test_table_file_loading(tmp_path):
    path = tmp_path / "table.txt"
    path.write_text("2\n2\n\n5\n9\n")
    assert load_table_file(path) == [2, 2, 5, 9]
    bad = tmp_path / "bad.txt"
    bad.write_text("2\nx\n")
    with pytest.raises(ValueError, match="bad.txt:2"):
        load_table_file(bad)


def test_table_length_must_match_grid():
    grid = ParamGrid((("i", (0.0, 1.0, 2.0)),))
    with pytest.raises(ValueError):
        TableModel([1, 2], 8, grid)


def test_register_must_cover_grid():
    grid = ParamGrid((("i", tuple(float(v) for v in range(5))),))
    with pytest.raises(ValueError):
        VirtualDb(0, grid, TableModel(list(range(5)), 8, grid), n_qubits=2)
