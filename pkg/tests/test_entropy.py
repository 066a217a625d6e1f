import io
import itertools
import math

import mpmath as mp
import pytest

from hitloc.entropy import (
    EntropyEstimate,
    entropy_closed_form_d3,
    entropy_lower,
    entropy_mc,
    entropy_quadrature,
    entropy_sweep,
    entropy_upper,
    jensen_gap,
    mutual_info_TN,
    noise_entropy,
    write_sweep_csv,
)
from hitloc.errors import DomainError
from hitloc.ndfhl import NdfhlParams, cauchy_entropy

mp.mp.dps = 30

H3_UNIT = 2.717016415768040535
MEAN_LOG_UNIT = -0.3613286168882226
GRID = list(itertools.product([2, 3, 4], [0.5, 1.0, 2.0], [0.1, 1.0, 10.0]))


def closed_form_ei(lam, u):
    """The d = 3 closed form written with Ei, evaluated in mpmath."""
    lam, u = mp.mpf(lam), mp.mpf(u)
    s = lam * u
    return float(
        mp.log(2 * mp.pi * mp.e**3) + 2 * mp.log(lam) - mp.log(1 + s)
        - s * mp.exp(s) * (mp.e * mp.ei(-1 - s) - 3 * mp.ei(-s))
    )


def radial_entropy_d3(lam, u):
    lam, u = mp.mpf(lam), mp.mpf(u)

    def f(r):
        rho = mp.sqrt(r * r + lam * lam)
        return lam / (2 * mp.pi * rho**3) * (1 + u * rho) * mp.exp(-u * (rho - lam))

    return float(mp.quad(lambda r: -2 * mp.pi * r * f(r) * mp.log(f(r)), [0, lam, 5 / u, 20 / u, mp.inf]))


def test_h3_oracles_agree():
    assert closed_form_ei(1, 1) == pytest.approx(H3_UNIT, abs=1e-15)
    assert radial_entropy_d3(1, 1) == pytest.approx(H3_UNIT, abs=1e-12)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("u", [0.1, 1.0, 10.0])
def test_closed_form_d3(lam, u):
    est = entropy_closed_form_d3(lam, u)
    assert est.method == "closed_form_d3" and est.error == 0
    assert est.value == pytest.approx(closed_form_ei(lam, u), abs=1e-12)
    quad = entropy_quadrature(NdfhlParams(3, lam, u))
    assert abs(quad.value - est.value) <= 1e-6
    assert quad.error <= 1e-8


def test_closed_form_large_drift_stays_finite():
    # e^{s} Ei(-s) overflows naively at s ~ 710
    v = entropy_closed_form_d3(1.0, 2000.0).value
    assert v == pytest.approx(closed_form_ei(1.0, 2000.0), abs=1e-10)


def test_closed_form_small_drift_limit():
    assert entropy_closed_form_d3(1.0, 1e-10).value == pytest.approx(cauchy_entropy(2, 1.0), abs=1e-6)
    with pytest.raises(DomainError):
        entropy_closed_form_d3(1.0, 0.0)


def test_cauchy_branch_quadrature():
    est = entropy_quadrature(NdfhlParams(2, 1.0, 0.0))
    assert est.value == pytest.approx(math.log(4 * math.pi), abs=1e-9)
    for d in (3, 4, 5):
        assert entropy_quadrature(NdfhlParams(d, 1.7, 0.0)).value == pytest.approx(cauchy_entropy(d - 1, 1.7), abs=1e-9)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_cauchy_continuity(d):
    g = cauchy_entropy(d - 1, 1.0)
    dist = [abs(entropy_quadrature(NdfhlParams(d, 1.0, u)).value - g) for u in (1e-1, 1e-2, 1e-3)]
    assert dist[0] > dist[1] > dist[2]
    assert dist[2] <= 0.05


@pytest.mark.parametrize("d,lam,u", GRID)
def test_sandwich_and_penalty(d, lam, u):
    prm = NdfhlParams(d, lam, u)
    h = entropy_quadrature(prm).value
    lo = entropy_lower(prm).value
    hi = entropy_upper(prm).value
    assert lo - 1e-8 <= h <= hi + 1e-8
    mi = mutual_info_TN(prm)
    assert 0 <= mi <= jensen_gap(prm) + 1e-8
    assert jensen_gap(prm) == pytest.approx(hi - lo, abs=1e-10)


@pytest.mark.parametrize("d,lam,u", GRID)
def test_quadrature_matches_monte_carlo(d, lam, u):
    prm = NdfhlParams(d, lam, u)
    mc = entropy_mc(prm, 200_000, seed=d * 100 + int(10 * lam) + int(100 * u))
    assert mc.method == "monte_carlo"
    assert abs(entropy_quadrature(prm).value - mc.value) <= 4 * mc.error + 1e-8


def test_monte_carlo_d3_against_closed_form():
    mc = entropy_mc(NdfhlParams(3, 1.0, 1.0), 10**6, 7)
    assert abs(mc.value - H3_UNIT) <= 4 * mc.error


def test_monte_carlo_scaling():
    # (lam, u) -> (c lam, u / c) scales N by c, adding p log c
    a = entropy_mc(NdfhlParams(3, 1.0, 1.0), 10**6, 1)
    b = entropy_mc(NdfhlParams(3, 2.0, 0.5), 10**6, 2)
    assert abs(b.value - a.value - 2 * math.log(2)) <= 4 * math.hypot(a.error, b.error)


def test_monte_carlo_budget():
    with pytest.raises(DomainError):
        entropy_mc(NdfhlParams(3, 1, 1), 100, 1)
    with pytest.raises(DomainError):
        entropy_mc(NdfhlParams(3, 1, 0), 10**4, 1)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("c", [0.5, 3.0])
def test_scale_covariance(d, c):
    base = entropy_quadrature(NdfhlParams(d, 0.8, 1.3)).value
    scaled = entropy_quadrature(NdfhlParams(d, 0.8 * c, 1.3 / c)).value
    assert scaled == pytest.approx(base + (d - 1) * math.log(c), abs=1e-8)


def test_bounds_values():
    prm = NdfhlParams(3, 1.0, 1.0)
    assert entropy_upper(prm).value == pytest.approx(math.log(2 * math.pi * math.e), abs=1e-15)
    assert entropy_upper(NdfhlParams(2, 2.0, 0.5)).value == pytest.approx(2.1120857137646181, abs=1e-15)
    lower = math.log(2 * math.pi * math.e) + MEAN_LOG_UNIT
    assert entropy_lower(prm).value == pytest.approx(lower, abs=1e-10)
    assert jensen_gap(prm) == pytest.approx(-MEAN_LOG_UNIT, abs=1e-10)
    assert mutual_info_TN(prm) == pytest.approx(H3_UNIT - lower, abs=1e-8)
    with pytest.raises(DomainError):
        entropy_upper(NdfhlParams(3, 1.0, 0.0))


def test_drift_dominated_limit():
    prm = NdfhlParams(3, 1.0, 1e3)
    assert jensen_gap(prm) <= 1e-3
    assert mutual_info_TN(prm) <= 2e-3
    assert entropy_upper(prm).value - entropy_lower(prm).value <= 1e-3 * prm.p


def test_large_drift_below_upper():
    assert entropy_upper(NdfhlParams(3, 1.0, 10.0)).value - entropy_closed_form_d3(1.0, 10.0).value >= 0


def test_noise_entropy_routes():
    assert noise_entropy(NdfhlParams(3, 1.0, 1.0)) == entropy_closed_form_d3(1.0, 1.0).value
    assert noise_entropy(NdfhlParams(4, 1.0, 1.0)) == entropy_quadrature(NdfhlParams(4, 1.0, 1.0)).value


def test_estimate_validation():
    prm = NdfhlParams(3, 1, 1)
    with pytest.raises(ValueError):
        EntropyEstimate(1.0, "guess", 0.0, prm)
    with pytest.raises(ValueError):
        EntropyEstimate(1.0, "quadrature", -1.0, prm)


def test_sweep_rows_and_csv():
    rows = entropy_sweep([2, 3], 1.0, [0.1, 1.0])
    assert len(rows) == 6
    assert rows[2] == (2, 1.0, 0.0, cauchy_entropy(1, 1.0), "closed_form_cauchy", 0.0)
    assert rows[5][:3] == (3, 1.0, 0.0)
    assert rows[4][3] == pytest.approx(H3_UNIT, abs=1e-8)
    buf = io.StringIO()
    write_sweep_csv(buf, rows)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "d,lambda,u,h,method,error"
    assert lines[1].startswith("2,1.0000000000000000e+00,1.0000000000000001e-01,")
