"""Differential entropy of NDFHL noise (nats).

Four routes are provided and cross-checked in the test-suite:

* ``entropy_quadrature`` - deterministic radial quadrature of ``-f log f``;
* ``entropy_mc`` - plug-in Monte-Carlo ``-mean(log f(N_i))``;
* ``entropy_closed_form_d3`` - the exponential-integral closed form for d = 3;
* ``entropy_lower`` / ``entropy_upper`` - the conditional-Gaussian and
  max-entropy bounds, whose difference is the mixing-time Jensen gap.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from hitloc import io
from hitloc._runtime import pmap
from hitloc.errors import ConvergenceError, DomainError
from hitloc.ig import ig_expectation
from hitloc.ndfhl import (
    NdfhlParams,
    cauchy_entropy,
    log_pdf_radial,
    mixing_law,
    sample,
)
from hitloc.special import log_gamma, scaled_e1, sphere_surface_area

__all__ = [
    "EntropyEstimate",
    "METHODS",
    "entropy_quadrature",
    "entropy_mc",
    "entropy_closed_form_d3",
    "entropy_lower",
    "entropy_upper",
    "jensen_gap",
    "mutual_info_TN",
    "noise_entropy",
    "entropy_sweep",
    "SWEEP_HEADER",
    "write_sweep_csv",
]

METHODS = ("quadrature", "monte_carlo", "closed_form_d3", "bound_lower", "bound_upper")
DEFAULT_TOL = 1e-8
_LOG_2PI_E = math.log(2.0 * math.pi * math.e)


@dataclass(frozen=True)
class EntropyEstimate:
    """An entropy value in nats.

    ``error`` is an absolute error estimate: the quadrature error bound, the
    Monte-Carlo standard error, or 0 for closed forms.
    """

    value: float
    method: str
    error: float
    params: NdfhlParams

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if not self.error >= 0:
            raise ValueError("error must be >= 0")

    def __float__(self):
        return float(self.value)


def _radial_tail_bound(params, r):
    """Bound on ``int_r^inf S r'^{p-1} |f log f| dr'`` for ``r >= 5/u``.

    Past ``5/u`` the integrand decays at rate at least ``0.9 u``; ``2/u`` is
    used as the decay length, with a further safety factor 2.
    """
    p = params.p
    lf = log_pdf_radial(params, r)
    dens = sphere_surface_area(p) * r ** (p - 1) * math.exp(lf) * abs(lf)
    return 2.0 * dens * 2.0 / params.u


def _quad(fn, a, b, tol, **kw):
    val, err = integrate.quad(fn, a, b, epsabs=tol, epsrel=1e-13, limit=500, **kw)
    return val, err


def _cauchy_entropy_quadrature(params, tol):
    # r = lam tan(theta) turns the algebraic tail into a proper integral on
    # [0, pi/2]; the Jacobian cancels to sin^{p-1}(theta).
    p, lam = params.p, params.lam
    h = 0.5 * (p + 1)
    log_c = log_gamma(h) - h * math.log(math.pi) - p * math.log(lam)
    weight = sphere_surface_area(p) * math.exp(log_c + p * math.log(lam))

    def integrand(theta):
        lf = log_c + (p + 1) * math.log(math.cos(theta))
        return -weight * math.sin(theta) ** (p - 1) * lf

    val, err = _quad(integrand, 0.0, 0.5 * math.pi, tol / 4.0)
    return val, err


def entropy_quadrature(params, tol=DEFAULT_TOL):
    """``h = -S_{p-1} int_0^inf r^{p-1} f(r) log f(r) dr`` within ``tol`` nats.

    ``[0, lam]`` is integrated in ``r``; ``[lam, R*]`` in ``log r`` with
    breakpoints at ``max(lam, 5/u)``. ``R*`` is grown until the exponential
    tail bound falls below ``tol/10``. ``u = 0`` uses the Cauchy density with
    the substitution ``r = lam tan(theta)``.

    Raises
    ------
    ConvergenceError
        If the accumulated quadrature error estimate exceeds ``tol``.
    """
    if params.u == 0:
        val, err = _cauchy_entropy_quadrature(params, tol)
        if err > tol:
            raise ConvergenceError(f"entropy quadrature error {err:.3g} exceeds tol")
        return EntropyEstimate(val, "quadrature", err, params)

    p, lam, u = params.p, params.lam, params.u
    surf = sphere_surface_area(p)
    knee = max(lam, 5.0 / u)
    r_max = 2.0 * knee
    while _radial_tail_bound(params, r_max) > tol / 10.0:
        r_max *= 1.5
    tail = _radial_tail_bound(params, r_max)

    def inner(r):
        lf = log_pdf_radial(params, r)
        return -surf * r ** (p - 1) * math.exp(lf) * lf

    def outer(s):
        r = math.exp(s)
        lf = log_pdf_radial(params, r)
        return -surf * r**p * math.exp(lf) * lf

    seg_tol = tol / 20.0
    total, err = _quad(inner, 0.0, lam, seg_tol)
    cuts = [math.log(lam)]
    # unit-width pieces in log r keep each Kronrod panel well resolved
    s_knee, s_max = math.log(knee), math.log(r_max)
    s = cuts[0]
    while s + 1.0 < s_knee:
        s += 1.0
        cuts.append(s)
    if s_knee > cuts[-1]:
        cuts.append(s_knee)
    while cuts[-1] + 1.0 < s_max:
        cuts.append(cuts[-1] + 1.0)
    cuts.append(s_max)
    for a, b in zip(cuts[:-1], cuts[1:]):
        v, e = _quad(outer, a, b, seg_tol)
        total += v
        err += e
    err += tail
    if err > tol:
        raise ConvergenceError(f"entropy quadrature error {err:.3g} exceeds tol {tol:.3g}")
    return EntropyEstimate(total, "quadrature", err, params)


def entropy_mc(params, n_samples, seed):
    """Plug-in estimate ``-mean(log f(N_i))``; ``error`` is the standard error."""
    params.require_drift()
    if int(n_samples) != n_samples or n_samples < 10_000:
        raise DomainError("entropy_mc needs n_samples >= 1e4")
    batch = sample(params, int(n_samples), seed)
    lf = log_pdf_radial(params, np.linalg.norm(batch.points, axis=1))
    se = float(np.std(lf, ddof=1) / math.sqrt(lf.size))
    return EntropyEstimate(float(-np.mean(lf)), "monte_carlo", se, params)


def entropy_closed_form_d3(lam, u):
    """Closed form for d = 3 (p = 2).

    ``log(2 pi e^3) + 2 log lam - log(1 + s) - s e^s (e Ei(-1-s) - 3 Ei(-s))``
    with ``s = lam u``. Since ``e^x Ei(-x) = -e^x E1(x)``, the bracket is
    evaluated with scaled ``E1`` and stays finite for any ``s``.
    """
    if not (u > 0 and math.isfinite(u)):
        raise DomainError("closed form requires u > 0")
    params = NdfhlParams(3, lam, u)
    s = lam * u
    bracket = 3.0 * scaled_e1(s) - scaled_e1(1.0 + s)
    val = math.log(2.0 * math.pi) + 3.0 + 2.0 * math.log(lam) - math.log1p(s) - s * bracket
    return EntropyEstimate(val, "closed_form_d3", 0.0, params)


def entropy_lower(params, tol=1e-10):
    """Conditional entropy ``h(N|T) = (p/2) log(2 pi e) + (p/2) E[log T]``."""
    law = mixing_law(params)
    m, e = ig_expectation(law, lambda y: y, tol)
    half_p = 0.5 * params.p
    return EntropyEstimate(half_p * (_LOG_2PI_E + m), "bound_lower", half_p * e, params)


def entropy_upper(params):
    """Gaussian max-entropy bound ``(p/2) log(2 pi e lam / u)``."""
    params.require_drift()
    val = 0.5 * params.p * (_LOG_2PI_E + math.log(params.lam / params.u))
    return EntropyEstimate(val, "bound_upper", 0.0, params)


def jensen_gap(params, tol=1e-10):
    """``(p/2)(log E[T] - E[log T])``, the width of the entropy sandwich."""
    law = mixing_law(params)
    m, _ = ig_expectation(law, lambda y: y, tol)
    return 0.5 * params.p * (math.log(law.nu) - m)


def mutual_info_TN(params, tol=DEFAULT_TOL):
    """Shape penalty ``I(N; T) = h(N) - h(N|T)``, clamped at 0 within ``tol``."""
    params.require_drift()
    h = entropy_quadrature(params, tol)
    lo = entropy_lower(params, min(tol, 1e-10))
    diff = h.value - lo.value
    if diff < -(tol + h.error + lo.error):
        raise ConvergenceError(f"negative mutual information {diff:.3g} beyond tolerance")
    return max(diff, 0.0)


@functools.lru_cache(maxsize=256)
def noise_entropy(params, tol=DEFAULT_TOL):
    """``h(N)`` for the capacity formulas: closed form when d = 3, else quadrature."""
    params.require_drift()
    if params.d == 3:
        return entropy_closed_form_d3(params.lam, params.u).value
    return entropy_quadrature(params, tol).value


SWEEP_HEADER = ("d", "lambda", "u", "h", "method", "error")


def entropy_sweep(ds, lam, u_grid, tol=DEFAULT_TOL):
    """Entropy rows ``(d, lam, u, h, method, error)`` over ``ds x u_grid``.

    Each dimension ends with a ``u = 0`` row holding the Cauchy entropy
    ``g(p)`` (method ``closed_form_cauchy``).
    """
    u_grid = [float(u) for u in u_grid]
    jobs = [(int(d), u) for d in ds for u in u_grid]

    def work(job):
        d, u = job
        est = entropy_quadrature(NdfhlParams(d, lam, u), tol)
        return (d, float(lam), u, est.value, est.method, est.error)

    results = pmap(work, jobs)
    rows = []
    per_d = len(u_grid)
    for i, d in enumerate(ds):
        rows.extend(results[i * per_d : (i + 1) * per_d])
        rows.append((int(d), float(lam), 0.0, cauchy_entropy(int(d) - 1, lam), "closed_form_cauchy", 0.0))
    return rows


def write_sweep_csv(fh, rows):
    io.write_csv(fh, SWEEP_HEADER, rows)
