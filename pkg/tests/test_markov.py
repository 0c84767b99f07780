import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvtcell.markov import (
    ChainParams,
    StateDistribution,
    blocking_probability,
    build_generator,
    busy_probability,
    mean_occupancy,
    mean_sojourn_time,
    solve_generator,
    state_space,
    stationary_distribution,
)
from pvtcell.numerics import erlang_b


def test_state_space_is_triangular():
    assert state_space(2) == [(0, 0), (0, 1), (1, 1), (0, 2), (1, 2), (2, 2)]
    assert len(state_space(20)) == 21 * 22 // 2


def test_unit_ratios_c1_uniform():
    dist = stationary_distribution(ChainParams(1, 1.0, 1.0, 1.0, 1.0))
    np.testing.assert_allclose(dist.probs, [1 / 3] * 3, atol=1e-15)
    assert blocking_probability(dist) == pytest.approx(2 / 3)
    assert busy_probability(dist) == pytest.approx(1 / 3)
    assert mean_sojourn_time(dist, 1.0) == pytest.approx(1 / 3)


def test_unit_ratios_c2():
    dist = stationary_distribution(ChainParams(2, 1.0, 1.0, 1.0, 1.0))
    # Unnormalised weights 1, 2, 2, 1, 1, 0.5 with total 7.5.
    np.testing.assert_allclose(dist.probs, np.array([1, 2, 2, 1, 1, 0.5]) / 7.5)
    assert blocking_probability(dist) == pytest.approx(3.5 / 7.5)


def test_negligible_load_keeps_mass_on_idle_row():
    dist = stationary_distribution(ChainParams(3, 1e-12, 1.0, 1.0, 1.0))
    assert dist.probs[dist.m == 0].sum() == pytest.approx(1.0, abs=1e-11)


def test_distribution_accessors():
    dist = stationary_distribution(ChainParams(3, 2.0, 1.0, 3.0, 1.0))
    assert dist[(1, 2)] == dist.as_dict()[(1, 2)]
    with pytest.raises(KeyError):
        dist[(3, 2)]
    assert mean_occupancy(dist) == pytest.approx(float(np.dot(dist.m, dist.probs)))


def test_csv_round_trip():
    dist = stationary_distribution(ChainParams(4, 2.5, 1.0, 3.0, 0.7))
    text = dist.to_csv()
    back = StateDistribution.from_csv(text)
    assert back.C == 4
    np.testing.assert_array_equal(back.probs, dist.probs)
    assert back.to_csv() == text


def test_parameter_validation():
    with pytest.raises(ValueError):
        ChainParams(0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ChainParams(2, 1.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        mean_sojourn_time(stationary_distribution(ChainParams(1, 1, 1, 1, 1)), 0.0)


def test_generator_rows_sum_to_zero():
    Q = build_generator(ChainParams(5, 1.3, 0.7, 0.9, 0.4))
    np.testing.assert_allclose(Q.sum(axis=1), 0.0, atol=1e-12)
    assert np.all(Q - np.diag(np.diag(Q)) >= 0)


def test_product_form_solves_generator():
    rng = np.random.default_rng(0)
    for C in range(1, 9):
        for _ in range(50):
            lam, eta, alpha, beta = np.exp(rng.uniform(-3, 3, 4))
            p = ChainParams(C, lam, eta, alpha, beta)
            a = stationary_distribution(p).probs
            b = solve_generator(build_generator(p)).probs
            assert np.max(np.abs(a - b)) < 1e-9


def test_solve_generator_rejects_bad_size():
    with pytest.raises(ValueError):
        solve_generator(np.zeros((4, 4)))


def test_large_channel_count_is_finite():
    dist = stationary_distribution(ChainParams(400, 300.0, 1.0, 1e4, 1e-3))
    assert np.all(np.isfinite(dist.probs))
    assert dist.probs.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("C", [1, 5, 10, 20])
@pytest.mark.parametrize("a", [0.5, 1.0, 5.0])
def test_erlang_limit(C, a):
    dist = stationary_distribution(ChainParams(C, a, 1.0, 1e6, 1.0))
    assert abs(blocking_probability(dist) - erlang_b(C, a)) < 1e-4


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.floats(0.05, 30), st.floats(0.05, 30), st.floats(0.01, 100))
def test_normalisation(C, lam, eta, ratio):
    dist = stationary_distribution(ChainParams(C, lam, eta, ratio, 1.0))
    assert abs(dist.probs.sum() - 1.0) < 1e-12


def test_blocking_monotone_grid():
    loads = np.linspace(0.5, 10, 10)
    ratios = np.geomspace(0.2, 50, 10)
    for load in loads:
        pb = [blocking_probability(stationary_distribution(ChainParams(C, load, 1.0, 2.0, 1.0)))
              for C in range(1, 11)]
        assert np.all(np.diff(pb) <= 1e-15)
        pb = [blocking_probability(stationary_distribution(ChainParams(5, load, 1.0, r, 1.0)))
              for r in ratios]
        assert np.all(np.diff(pb) <= 1e-15)
