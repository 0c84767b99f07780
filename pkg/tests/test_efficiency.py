import numpy as np
import pytest

from pvtcell.coupling import OutageCache, outage_table, solve_fixed_point
from pvtcell.efficiency import (
    RadioEconomics,
    cell_throughput,
    efficiency_report,
    energy_efficiency,
    link_capacity,
    link_capacity_detail,
    operation_energy,
    spatial_spectrum_efficiency,
    weighted_link_capacity,
)
from pvtcell.markov import ChainParams, StateDistribution, state_space, stationary_distribution
from pvtcell.oracles import noise_only_success
from pvtcell.params import DEFAULTS

YEAR = 3.1536e7


class _FP:
    """Minimal stand-in carrying a distribution."""

    def __init__(self, dist):
        self.dist = dist


def _dist_with(p_block, occupancy):
    # C=1 distribution over (0,0), (0,1), (1,1).
    p11 = occupancy
    p00 = p_block - p11
    return StateDistribution(1, np.array([p00, 1 - p00 - p11, p11]))


def test_capacity_examples():
    assert link_capacity(1, lambda g, d: np.ones_like(g)) == 0.0
    step = link_capacity(1, lambda g, d: np.where(g <= 1.0, 0.0, 1.0))
    assert step == pytest.approx(1.0, abs=1e-6)


def test_capacity_truncation_recorded():
    res = link_capacity_detail(0, lambda g, d: 1 - np.exp(-0.5 * np.log2(1 + g)))
    assert res.truncation >= 32
    assert res.value == pytest.approx(2.0, rel=1e-4)


def test_noise_only_capacity_matches_reduction():
    link = DEFAULTS.link()
    table = outage_table(link, deltas=[0])
    got = link_capacity(0, table)

    def succ(t):
        return noise_only_success(2.0**t - 1, link)

    from scipy.integrate import quad
    ref = quad(succ, 0, 80, limit=400)[0]
    assert abs(got - ref) < 1e-3


def test_weighted_capacity_limits():
    def outage(g, d):
        return np.minimum(1.0, 0.1 * d * np.ones_like(g)) * (np.asarray(g) > 0)

    cap0 = link_capacity(0, outage)
    assert weighted_link_capacity(0.0, outage, pool=4) == pytest.approx(cap0)
    assert weighted_link_capacity(1.0, outage, pool=4) == pytest.approx(link_capacity(4, outage))


def test_throughput_examples():
    econ = RadioEconomics(bandwidth=1e5)
    # Blocking 0.5 and mean occupancy 4, split over states (4, 4) and (4, 5).
    states = state_space(5)
    probs = np.zeros(len(states))
    probs[states.index((4, 4))] = 0.5
    probs[states.index((4, 5))] = 0.5
    fp = _FP(StateDistribution(5, probs))
    assert cell_throughput(fp, 2.0, econ) == pytest.approx(4e5)
    full = _FP(_dist_with(1.0, 1.0))
    assert cell_throughput(full, 2.0, econ) == 0.0
    empty = _FP(_dist_with(0.0, 0.0))
    assert cell_throughput(empty, 2.0, econ) == 0.0


def test_sse_examples():
    assert spatial_spectrum_efficiency(0.0, 0.2) == 0.0
    assert spatial_spectrum_efficiency(4e5, 0.2) == pytest.approx(8e4)
    assert spatial_spectrum_efficiency(4e5, 0.4) == pytest.approx(2 * 8e4)


def test_operation_energy_examples():
    econ = RadioEconomics()
    assert econ.t_lifetime == YEAR
    assert operation_energy(0.0, econ) == pytest.approx(2.2548e9, rel=1e-4)
    assert operation_energy(10.0, RadioEconomics(t_lifetime=1.0)) == pytest.approx(149.9)
    assert operation_energy(5.0, RadioEconomics(t_lifetime=0.0)) == 0.0


def test_energy_efficiency_examples():
    econ = RadioEconomics()
    assert energy_efficiency(0.0, econ, 3.0) == 0.0
    assert energy_efficiency(1e6, econ, 0.0) == pytest.approx(361.4, abs=0.05)
    assert energy_efficiency(2e6, econ, 2.0) == pytest.approx(2 * energy_efficiency(1e6, econ, 2.0))
    with pytest.raises(ZeroDivisionError):
        energy_efficiency(1.0, RadioEconomics(E_embodied=0.0, k=0.0, h=0.0), 0.0)


def test_economics_validation():
    with pytest.raises(ValueError):
        RadioEconomics(bandwidth=-1)


def test_report_is_consistent():
    link = DEFAULTS.link()
    table = outage_table(link, deltas=range(25))
    fp = solve_fixed_point((DEFAULTS.C, DEFAULTS.lam, DEFAULTS.eta), link, cache=OutageCache(link))
    rep = efficiency_report(fp, table, link.lambda_B)
    assert rep.sse == pytest.approx(link.lambda_B * rep.throughput)
    assert rep.throughput == pytest.approx(cell_throughput(fp, rep.link_capacity, RadioEconomics()))
    fixed = efficiency_report(fp, table, link.lambda_B, delta=1)
    assert fixed.link_capacity == pytest.approx(link_capacity(1, table))
    for v in (rep.throughput, rep.link_capacity, rep.sse, rep.ee, rep.mean_occupancy):
        assert v >= 0


def test_dist_helper_sanity():
    d = stationary_distribution(ChainParams(1, 1, 1, 1, 1))
    assert d.probs.sum() == pytest.approx(1)
