"""High-SNR capacity of ``Y = X + N`` with NDFHL noise under ``E|X|^2 <= P``.

Everything is in nats and in the ``sigma = 1`` gauge (``T ~ IG(lam/u, lam^2)``).

* upper bound: ``(p/2) log(2 pi e (P/p + lam/u)) - h(N)``;
* Gaussian-input lower bound: ``E[(p/2) log(1 + P/(p T))] - I(T; N)``;
* both approach ``(p/2) log P + c*`` with ``c* = (p/2) log(2 pi e / p) - h(N)``.

No bound is emitted for ``u = 0``; the Cauchy endpoint only appears through
:func:`offset_curve`, and the ``P -> inf`` and ``u -> 0`` limits are never
combined in one reported number.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from hitloc import io
from hitloc._runtime import pmap
from hitloc.entropy import DEFAULT_TOL, mutual_info_TN, noise_entropy
from hitloc.errors import ConvergenceError, DomainError
from hitloc.ig import ig_expectation, ig_sample
from hitloc.ndfhl import NdfhlParams, cauchy_entropy, mixing_law

__all__ = [
    "CapacityReport",
    "CSV_HEADER",
    "capacity_upper",
    "capacity_lower",
    "conditional_rate",
    "conditional_rate_mc",
    "refined_offset",
    "effective_noise_power",
    "offset_curve",
    "conditioning_gap_bound",
    "capacity_report",
    "capacity_table",
    "write_capacity_csv",
    "write_capacity_json",
]

_LOG_2PI_E = math.log(2.0 * math.pi * math.e)


@dataclass(frozen=True)
class CapacityReport:
    power: float
    upper: float
    lower: float
    gap: float
    offset_c_star: float
    params: NdfhlParams

    @property
    def lower_clamped(self):
        """Achievable rate floor: ``max(lower, 0)``."""
        return max(self.lower, 0.0)

    def row(self):
        p = self.params
        return (p.d, p.lam, p.u, self.power, self.upper, self.lower, self.gap, self.offset_c_star)

    def as_dict(self):
        return dict(zip(CSV_HEADER, self.row()))


CSV_HEADER = ("d", "lambda", "u", "P", "upper", "lower", "gap", "c_star")


def _check_power(power):
    if not (power > 0 and math.isfinite(power)):
        raise DomainError(f"power must be finite and > 0, got {power}")
    return float(power)


def capacity_upper(params, power, h=None):
    """Max-entropy upper bound on ``C(P)``; ``h`` overrides ``h(N)`` if given."""
    params.require_drift()
    power = _check_power(power)
    p = params.p
    if h is None:
        h = noise_entropy(params)
    return 0.5 * p * (_LOG_2PI_E + math.log(power / p + params.lam / params.u)) - h


def conditional_rate(params, power, tol=1e-10):
    """``I(X; Y | T) = E[(p/2) log(1 + P/(p T))]`` for Gaussian input, by quadrature."""
    params.require_drift()
    power = _check_power(power)
    half_p = 0.5 * params.p
    log_snr = math.log(power / params.p)
    # log(1 + e^{log_snr - y}) via logaddexp keeps precision for huge P
    val, _ = ig_expectation(
        mixing_law(params), lambda y: half_p * float(np.logaddexp(0.0, log_snr - y)), tol
    )
    return val


def conditional_rate_mc(params, power, count, seed):
    """Monte-Carlo counterpart of :func:`conditional_rate`; returns ``(mean, se)``."""
    params.require_drift()
    power = _check_power(power)
    t = ig_sample(mixing_law(params), count, seed)
    vals = 0.5 * params.p * np.log1p(power / (params.p * t))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


@functools.lru_cache(maxsize=256)
def _shape_penalty(params, tol):
    return mutual_info_TN(params, tol)


def capacity_lower(params, power, tol=DEFAULT_TOL, mc_budget=0, seed=0):
    """Gaussian-input achievable rate ``I(X;Y|T) - I(T;N)``, reported raw.

    The value may be negative at low power; use ``max(lower, 0)`` for an
    achievable-rate floor. With ``mc_budget > 0`` the quadrature of the
    conditional rate is cross-checked against that many IG draws and a
    disagreement beyond 4 standard errors raises :class:`ConvergenceError`.
    """
    rate = conditional_rate(params, power, min(tol, 1e-10))
    if mc_budget:
        mc, se = conditional_rate_mc(params, power, int(mc_budget), seed)
        if abs(mc - rate) > 4.0 * se + tol:
            raise ConvergenceError(
                f"conditional rate quadrature {rate:.10g} disagrees with MC {mc:.10g} (se {se:.3g})"
            )
    return rate - _shape_penalty(params, tol)


def refined_offset(params):
    """Exact high-SNR constant ``c* = (p/2) log(2 pi e / p) - h(N)``."""
    params.require_drift()
    p = params.p
    return 0.5 * p * math.log(2.0 * math.pi * math.e / p) - noise_entropy(params)


def effective_noise_power(params):
    """Entropy power ``exp(2 h(N) / p) / (2 pi e)``; never exceeds ``lam / u``."""
    params.require_drift()
    return math.exp(2.0 * noise_entropy(params) / params.p) / (2.0 * math.pi * math.e)


def offset_curve(d, lam, u_grid):
    """``[(u, L(u))]`` with ``L(u) = (p/2) log(2 pi e / p) - h(N; u)``.

    ``u = 0`` entries use the Cauchy entropy ``g(p)``.
    """
    p = int(d) - 1
    const = 0.5 * p * math.log(2.0 * math.pi * math.e / p)

    def point(u):
        u = float(u)
        if u < 0:
            raise DomainError("offset curve needs u >= 0")
        if u == 0:
            h = cauchy_entropy(p, lam)
        else:
            h = noise_entropy(NdfhlParams(d, lam, u))
        return (u, const - h)

    return pmap(point, list(u_grid))


def conditioning_gap_bound(params, tol=DEFAULT_TOL):
    """Power-independent bound ``I(T; sqrt(T) Z)`` on the conditioning gap."""
    return _shape_penalty(params.require_drift(), tol)


def capacity_report(params, power, tol=DEFAULT_TOL):
    up = capacity_upper(params, power)
    lo = capacity_lower(params, power, tol)
    return CapacityReport(float(power), up, lo, up - lo, refined_offset(params), params)


def capacity_table(params, powers, tol=DEFAULT_TOL):
    params.require_drift()
    noise_entropy(params)
    _shape_penalty(params, tol)
    return pmap(lambda P: capacity_report(params, P, tol), list(powers))


def write_capacity_csv(fh, reports):
    io.write_csv(fh, CSV_HEADER, [r.row() for r in reports])


def write_capacity_json(fh, reports):
    io.write_json(fh, [r.as_dict() for r in reports])
