import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvtcell.numerics import (
    PoleError,
    QuadratureError,
    QuadratureSpec,
    complex_power,
    erlang_b,
    gamma_real,
    integrate_adaptive,
    integrate_semi_infinite,
)


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (0.5, math.sqrt(math.pi)),
                                         (-0.5, -2 * math.sqrt(math.pi))])
def test_gamma_examples(x, expected):
    assert gamma_real(x) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("x", [0, -1, -2, -7])
def test_gamma_poles(x):
    with pytest.raises(PoleError):
        gamma_real(x)


def test_gamma_recurrence():
    xs = np.linspace(0.1, 20.0, 1000)
    for x in xs:
        assert gamma_real(x + 1) == pytest.approx(x * gamma_real(x), rel=1e-12)


@pytest.mark.parametrize("z, a, expected", [
    (1 + 0j, 0.5, 1 + 0j),
    (1j, 0.5, complex(math.sqrt(0.5), math.sqrt(0.5))),
    (-1j, 0.5, complex(math.sqrt(0.5), -math.sqrt(0.5))),
])
def test_complex_power_examples(z, a, expected):
    assert abs(complex_power(z, a) - expected) < 1e-12


def test_complex_power_zero():
    with pytest.raises(ValueError):
        complex_power(0j, -0.5)
    with pytest.raises(ValueError):
        complex_power(np.array([0j, 1j]), 0.0)
    assert complex_power(0j, 2.0) == 0


def test_complex_power_square_matches_product():
    rng = np.random.default_rng(1)
    mod = 10 ** rng.uniform(-3, 3, 1000)
    z = mod * np.exp(1j * rng.uniform(-np.pi, np.pi, 1000))
    got = complex_power(z, 2.0)
    assert np.max(np.abs(got - z * z) / np.abs(z * z)) < 1e-12
    for zi in z[:50]:
        assert abs(complex_power(complex(zi), 2.0) - zi * zi) <= 1e-12 * abs(zi * zi)


def test_complex_power_branch_on_negative_axis():
    # Arg(-1) = pi on the principal branch.
    assert abs(complex_power(-1 + 0j, 0.5) - 1j) < 1e-15


def test_integrate_examples():
    assert integrate_adaptive(lambda x: np.ones_like(x), 0, 1).value == pytest.approx(1.0)
    res = integrate_adaptive(lambda x: np.exp(-x), 0, 50)
    assert abs(res.value - (1 - math.exp(-50))) < 1e-10
    res = integrate_adaptive(lambda x: np.exp(1j * x), 0, math.pi)
    assert abs(res.value - 2j) < 1e-9


@pytest.mark.parametrize("k", range(9))
def test_integrate_monomials(k):
    spec = QuadratureSpec()
    res = integrate_adaptive(lambda x: x**k, 0, 1, spec)
    assert abs(res.value - 1 / (k + 1)) <= max(spec.abs_tol, spec.rel_tol / (k + 1))


def test_integrate_vector_valued():
    res = integrate_adaptive(lambda x: np.stack([x, x**2], axis=-1), 0, 1)
    np.testing.assert_allclose(res.value, [0.5, 1 / 3], rtol=1e-10)


def test_integrate_reports_error_estimate():
    res = integrate_adaptive(lambda x: np.sqrt(x), 0, 1)
    assert abs(res.value - 2 / 3) <= max(res.error, 1e-9)
    assert res.subdivisions >= 1


def test_integrate_non_convergence_carries_estimate():
    spec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=3)
    with pytest.raises(QuadratureError) as info:
        integrate_adaptive(lambda x: np.sin(50 * x) ** 2, 0, 10, spec)
    assert info.value.error > 0
    assert np.isfinite(info.value.value)


def test_semi_infinite_examples():
    lam = 0.2
    res = integrate_semi_infinite(lambda r: 2 * np.pi * lam * r * np.exp(-np.pi * lam * r**2))
    assert res.value == pytest.approx(1.0, abs=1e-9)
    assert "substitution" in res.meta
    assert integrate_semi_infinite(lambda r: np.exp(-r)).value == pytest.approx(1.0, abs=1e-9)
    assert integrate_semi_infinite(lambda r: r * np.exp(-r**2)).value == pytest.approx(0.5, abs=1e-9)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)
    with pytest.raises(ValueError):
        QuadratureSpec(truncation_radius=-1)


def test_erlang_b_examples():
    assert erlang_b(1, 1.0) == pytest.approx(0.5)
    assert erlang_b(2, 1.0) == pytest.approx(0.2)
    assert erlang_b(20, 1.0) < 1e-18


def test_erlang_b_rejects_bad_input():
    with pytest.raises(ValueError):
        erlang_b(3, 0.0)
    with pytest.raises(ValueError):
        erlang_b(0, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.floats(0.01, 50.0))
def test_erlang_b_monotone(C, a):
    assert erlang_b(C + 1, a) < erlang_b(C, a)
    assert erlang_b(C, a * 1.01) > erlang_b(C, a)
