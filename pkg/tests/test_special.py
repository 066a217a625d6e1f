import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hitloc.errors import DomainError
from hitloc.special import (
    AccuracyPolicy,
    bessel_k,
    digamma,
    exp_integral_e1,
    exp_integral_ei,
    log_bessel_k,
    log_bessel_k_scaled,
    log_gamma,
    scaled_e1,
    sphere_surface_area,
)

mp.mp.dps = 30


def k_integral(order, x):
    """K_v(x) = int_0^inf exp(-x cosh t) cosh(v t) dt, independent of any library K."""
    f = lambda t: mp.exp(-x * mp.cosh(t)) * mp.cosh(order * t)
    return float(mp.quad(f, [0, 1, 3, 8, 20]))


# frozen high-precision values
K_FROZEN = [
    (0.5, 1.0, 0.46106850444789456),
    (1.0, 1.0, 0.6019072301972346),
    (1.5, 1.0, 0.9221370088957891),
]


@pytest.mark.parametrize("order,x,expected", K_FROZEN)
def test_bessel_k_frozen(order, x, expected):
    assert bessel_k(order, x) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("order", [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.5])
@pytest.mark.parametrize("x", [0.05, 0.7, 3.0, 25.0])
def test_bessel_k_against_integral_representation(order, x):
    assert bessel_k(order, x) == pytest.approx(k_integral(order, x), rel=1e-11)


def test_bessel_k_half_order_closed_form():
    x = 2.3
    assert bessel_k(0.5, x) == pytest.approx(math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel=1e-15)


def test_scaled_bessel_survives_large_argument():
    # K_{1.5}(800) underflows, its scaled form does not
    expected = float(mp.log(mp.besselk(1.5, 800)) + 800)
    assert log_bessel_k_scaled(1.5, 800.0) == pytest.approx(expected, abs=1e-12)
    assert log_bessel_k_scaled(2.0, 800.0) == pytest.approx(
        float(mp.log(mp.besselk(2, 800)) + 800), abs=1e-12
    )


@settings(max_examples=200, deadline=None)
@given(
    order=st.sampled_from([0.5, 1.0, 1.5, 2.0, 2.5, 3.0]),
    x=st.floats(1e-3, 500.0, allow_nan=False),
)
def test_log_bessel_is_scaled_minus_x(order, x):
    assert log_bessel_k(order, x) == pytest.approx(log_bessel_k_scaled(order, x) - x, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(order=st.floats(0.0, 4.0), x=st.floats(0.01, 30.0))
def test_bessel_k_decreasing_in_x(order, x):
    assert bessel_k(order, x * 1.01) < bessel_k(order, x)


def test_bessel_k_vectorized():
    xs = np.array([0.3, 1.0, 4.0])
    out = log_bessel_k_scaled(1.5, xs)
    assert out.shape == (3,)
    assert np.allclose(out, [log_bessel_k_scaled(1.5, x) for x in xs], rtol=0, atol=0)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_bessel_k_domain(bad):
    with pytest.raises(DomainError):
        bessel_k(1.0, bad)


def test_bessel_k_negative_order_rejected():
    with pytest.raises(DomainError):
        bessel_k(-0.5, 1.0)


def test_digamma_values():
    assert digamma(1.0) == pytest.approx(-0.5772156649015329, abs=1e-15)
    assert digamma(0.5) == pytest.approx(-1.9635100260214235, abs=1e-14)
    assert digamma(2.0) == pytest.approx(0.42278433509846714, abs=1e-15)
    with pytest.raises(DomainError):
        digamma(0.0)
    with pytest.raises(DomainError):
        digamma(-2.0)


def test_log_gamma():
    assert log_gamma(1.5) == pytest.approx(math.log(math.sqrt(math.pi) / 2), abs=1e-15)
    with pytest.raises(DomainError):
        log_gamma(0.0)


@pytest.mark.parametrize(
    "x,expected",
    [(-1.0, -0.21938393439552027), (-2.0, -0.04890051070806112), (1.0, 1.8951178163559368)],
)
def test_ei_frozen(x, expected):
    assert exp_integral_ei(x) == pytest.approx(expected, rel=1e-13)


def test_ei_singular_at_zero():
    with pytest.raises(DomainError):
        exp_integral_ei(0.0)


@pytest.mark.parametrize("x", [1e-4, 0.3, 0.999, 1.0, 1.7, 6.0, 40.0, 300.0])
def test_e1_against_mpmath(x):
    assert exp_integral_e1(x) == pytest.approx(float(mp.e1(x)), rel=1e-13)
    assert scaled_e1(x) == pytest.approx(float(mp.exp(x) * mp.e1(x)), rel=1e-13)


def test_scaled_e1_huge_argument():
    # e^x E1(x) ~ 1/x - 1/x^2 for large x
    x = 1e6
    assert scaled_e1(x) == pytest.approx(1 / x - 1 / x**2 + 2 / x**3, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(1e-3, 1e3))
def test_scaled_e1_bracketed(x):
    # 1/(x+1) < e^x E1(x) < 1/x
    v = scaled_e1(x)
    assert 1.0 / (x + 1.0) < v < 1.0 / x


def test_accuracy_policy_validation():
    with pytest.raises(DomainError):
        AccuracyPolicy(rel_tol=0.1)
    with pytest.raises(DomainError):
        AccuracyPolicy(max_terms=3)


def test_sphere_surface():
    assert sphere_surface_area(1) == pytest.approx(2.0)
    assert sphere_surface_area(2) == pytest.approx(2 * math.pi)
    assert sphere_surface_area(3) == pytest.approx(4 * math.pi)
