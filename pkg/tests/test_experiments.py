import numpy as np
import pytest

from pvtcell.experiments import (
    FIGURES,
    Evaluator,
    SweepResult,
    blocking_rows,
    efficiency_rows,
    run_figure,
)
from pvtcell.montecarlo import MCConfig
from pvtcell.params import DEFAULTS, db_to_linear


def test_column_filter():
    res = SweepResult(["a", "b"], [{"a": 1, "b": 2}, {"a": 1, "b": 3}, {"a": 2, "b": 4}])
    np.testing.assert_array_equal(res.column("b", a=1), [2, 3])


def test_unknown_model_and_figure():
    with pytest.raises(ValueError):
        Evaluator("lattice")
    with pytest.raises(ValueError):
        run_figure(2)
    assert sorted(FIGURES) == list(range(3, 11))


def test_blocking_rows_keep_order_and_threads_agree():
    pts = [DEFAULTS.replace(gamma0=db_to_linear(g)) for g in (0.0, 10.0, 20.0)]
    ev = Evaluator()
    one = blocking_rows(pts, ev, workers=1)
    three = blocking_rows(pts, ev, workers=3)
    assert one.rows == three.rows
    assert list(one.column("gamma0_db")) == [0.0, 10.0, 20.0]
    assert np.all(np.diff(one.column("blocking")) > 0)


def test_failed_point_is_reported_per_row():
    ev = Evaluator()
    row = ev.chain_row(DEFAULTS.replace(b=1.5))
    assert row["status"].startswith("error")


def test_fixed_delta_and_weighted_capacity_rows():
    ev = Evaluator()
    p = [DEFAULTS]
    weighted = efficiency_rows(p, ev).rows[0]
    fixed = efficiency_rows(p, ev, delta=0).rows[0]
    assert weighted["delta"] == "weighted" and fixed["delta"] == "0"
    # Interference can only lower the capacity.
    assert fixed["link_capacity"] >= weighted["link_capacity"]


def test_grid_mc_model_runs():
    ev = Evaluator("grid-mc", mc=MCConfig(trials=2_000, seed=1))
    row = efficiency_rows([DEFAULTS], ev, delta=1).rows[0]
    assert row["status"] == "ok" and row["sse"] > 0
