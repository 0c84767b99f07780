import math

import mpmath
import numpy as np
import pytest

from pvtcell.interference import (
    NO_FADING,
    RAYLEIGH,
    FadingKind,
    FadingModel,
    LinkParams,
    UnsupportedModelError,
    fading_fractional_moment,
    laplace_fading,
    laplace_interference,
    laplace_interference_disk,
    laplace_interferer_disk,
    laplace_noise,
    limit_transform_tail_exponent,
    outage_detail,
    outage_probabilities,
    outage_probability,
    success_probability,
    unavailable_probability,
)
from pvtcell.oracles import disk_success, noise_only_success
from pvtcell.params import DEFAULTS, db_to_linear

NAKAGAMI = FadingModel(FadingKind.NAKAGAMI, m=2.0)


def unit_link(**kw):
    base = dict(lambda_B=0.2, b=4.0, K_prime=1.0, noise_power=0.0, gamma0=1.0)
    base.update(kw)
    return LinkParams(**base)


def test_laplace_noise_examples():
    assert laplace_noise(0, 3.0) == 1
    assert laplace_noise(1, 1.0) == pytest.approx(math.exp(-1))
    assert abs(laplace_noise(1j, 1.0) - complex(math.cos(1), -math.sin(1))) < 1e-15


def test_laplace_fading_examples():
    assert laplace_fading(0, RAYLEIGH) == 1
    assert laplace_fading(1, RAYLEIGH) == pytest.approx(0.5)
    assert laplace_fading(1, NO_FADING) == pytest.approx(math.exp(-1))
    with pytest.raises(ZeroDivisionError):
        laplace_fading(-1, RAYLEIGH)
    with pytest.raises(UnsupportedModelError):
        laplace_fading(1, NAKAGAMI)


def test_fractional_moment_examples():
    assert fading_fractional_moment(RAYLEIGH, 0, 4) == 1
    assert fading_fractional_moment(RAYLEIGH, 2, 4) == pytest.approx(1.0)
    assert fading_fractional_moment(RAYLEIGH, 1, 4) == pytest.approx(math.sqrt(math.pi) / 2)
    assert fading_fractional_moment(NO_FADING, 3, 4) == 1
    with pytest.raises(UnsupportedModelError):
        fading_fractional_moment(FadingModel(FadingKind.LOGNORMAL, sigma=1.0), 1, 4)
    with pytest.raises(ValueError):
        fading_fractional_moment(RAYLEIGH, 1, 0)


def test_limit_transform_examples():
    link = unit_link()
    assert laplace_interference(1.0, 0, link) == 1
    # (1/4) * Gamma(-1/2) * Gamma(3/2) = (1/4)(-2 sqrt(pi))(sqrt(pi)/2) = -pi/4
    expected = 0.25 * math.gamma(-0.5) * math.gamma(1.5)
    assert laplace_interference(1.0, 1, link) == pytest.approx(expected)
    assert expected == pytest.approx(-math.pi / 4)
    assert laplace_interference(1.0, 2, link) == pytest.approx(math.pi / 4)


def test_limit_transform_domain():
    with pytest.raises(ValueError):
        laplace_interference(0.0, 1, unit_link())
    with pytest.raises(ValueError):
        unit_link(b=2.0)
    with pytest.raises(ValueError):
        unit_link(b=1.5)


def test_transforms_equal_one_at_origin():
    link = unit_link()
    assert laplace_fading(0, RAYLEIGH) == 1
    assert laplace_fading(0, NO_FADING) == 1
    assert laplace_noise(0, 0.5) == 1
    assert laplace_interference(0.0, 0, link) == 1
    assert laplace_interference_disk(0.0, 3, link) == pytest.approx(1.0)


def test_limit_transform_tail_exponent():
    assert limit_transform_tail_exponent(1, 4) == -0.5
    assert limit_transform_tail_exponent(2, 4) == 0.0


def _disk_reference(q, beta):
    q = mpmath.mpc(q)
    return complex(mpmath.quad(lambda v: v**beta / (q + v**beta), [0, 0.5, 1]))


@pytest.mark.parametrize("beta", [1.5, 2.0, 2.5])
@pytest.mark.parametrize("q", [1e-4 - 0j, 0.3, -0.4j, 0.2 - 0.3j, 1.0, -1.2j, 0.7 - 1.1j,
                               3.0, -5j, 40 - 2j, -1e3j])
def test_disk_transform_against_mpmath(q, beta):
    link = unit_link(b=2 * beta, disk_radius=1.0)
    got = laplace_interferer_disk(q, link)
    assert abs(got - _disk_reference(q, beta)) < 1e-12


def test_disk_transform_leading_term_is_limit_form():
    # 1 - L1 ~ -(2/a^2) * limit form as the disk grows.
    link = DEFAULTS.link()
    a = link.radius
    for s in (1e-3, 1e-2, 1e-1):
        for z in (s, -1j * s):
            exact = 1 - laplace_interferer_disk(z, link)
            lead = -2 / a**2 * laplace_interference(z, 1, link)
            assert abs(exact - lead) < 1e-3 * abs(lead)


def test_outage_zero_delta_no_noise():
    link = unit_link()
    assert outage_probability(1e-6, 0, link) == pytest.approx(0.0, abs=1e-12)


def test_outage_monotone_in_threshold(link):
    p1 = outage_probabilities(1.0, range(7), link)
    p10 = outage_probabilities(10.0, range(7), link)
    assert np.all(p1 <= p10)


def test_outage_monotone_grids(link):
    grid = db_to_linear(np.linspace(-10, 30, 20))
    table = np.array([outage_probabilities(g, range(7), link) for g in grid])
    assert np.all(np.diff(table, axis=0) >= -1e-12)
    assert np.all(np.diff(table, axis=1) >= -1e-12)
    assert np.all((table >= 0) & (table <= 1))


def test_success_is_complement(link):
    for d in (0, 1, 5):
        assert success_probability(10.0, d, link) == pytest.approx(
            1 - outage_probability(10.0, d, link), abs=1e-15)


@pytest.mark.parametrize("g_db", np.linspace(-10, 40, 20))
def test_noise_only_matches_one_dimensional_reduction(link, g_db):
    g = db_to_linear(g_db)
    assert abs(success_probability(g, 0, link) - noise_only_success(g, link)) < 1e-6


@pytest.mark.parametrize("b", [3.0, 4.0, 5.5])
@pytest.mark.parametrize("delta", [1, 3, 10])
def test_outage_matches_real_axis_reduction(b, delta):
    link = DEFAULTS.replace(b=b).link()
    for g in (1.0, 10.0, 1e3):
        analytic = success_probability(g, delta, link)
        assert abs(analytic - disk_success(g, delta, link)) < 1e-7


def test_outage_diagnostics(link):
    r = outage_detail(10.0, [0, 1, 2], link)
    assert r.excursion < 1e-3
    assert r.error < 1e-6
    lo, hi = r.meta["log_s_range"]
    assert lo < hi
    assert "substitution" in r.meta


def test_outage_rejects_unsupported_paths(link):
    with pytest.raises(UnsupportedModelError):
        outage_probability(10.0, 1, link, NAKAGAMI)
    with pytest.raises(UnsupportedModelError):
        outage_probability(10.0, 1, link, NO_FADING)
    with pytest.raises(ValueError):
        outage_probability(10.0, -1, link)


def test_unavailable_examples(link):
    zeros = np.zeros(25)
    assert unavailable_probability(0.3, link, n_max=24, outage=zeros) == 0
    ones = np.r_[0.0, np.ones(24)]
    for p in (0.1, 0.5, 0.9):
        got = unavailable_probability(p, link, n_max=24, outage=ones)
        assert got == pytest.approx(1 - (1 - p) ** 24, abs=1e-14)
    assert unavailable_probability(0.0, link, n_max=24) == 0.0
    with pytest.raises(ValueError):
        unavailable_probability(1.5, link)


def test_unavailable_analytic_is_small_at_defaults(link):
    eps = unavailable_probability(0.5, link, n_max=24)
    assert 0 < eps < 0.05


def test_fading_model_parse_and_validation():
    assert FadingModel.parse("rayleigh") == RAYLEIGH
    m = FadingModel.parse("nakagami-lognormal:2:0.5")
    assert (m.m, m.sigma) == (2.0, 0.5)
    assert str(FadingModel.parse("nakagami:3")) == "nakagami:3"
    with pytest.raises(ValueError):
        FadingModel(FadingKind.NAKAGAMI, m=0.3)
    with pytest.raises(ValueError):
        FadingModel(FadingKind.LOGNORMAL, sigma=0.0)
    with pytest.raises(ValueError):
        FadingModel.parse("weird")


def test_default_disk_radius():
    assert DEFAULTS.link().radius == pytest.approx(50 / math.sqrt(0.2))
    assert unit_link(disk_radius=7.0).radius == 7.0
