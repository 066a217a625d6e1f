"""Scalar special functions used by the density, entropy and capacity formulas.

Half-integer Bessel orders (odd ambient dimension) and the scaled exponential
integral are evaluated with the closed forms / continued fraction below; the
remaining orders and functions delegate to :mod:`scipy.special`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from hitloc.errors import ConvergenceError, DomainError

__all__ = [
    "AccuracyPolicy",
    "DEFAULT_POLICY",
    "bessel_k",
    "log_bessel_k",
    "log_bessel_k_scaled",
    "digamma",
    "log_gamma",
    "exp_integral_ei",
    "exp_integral_e1",
    "scaled_e1",
    "sphere_surface_area",
]


@dataclass(frozen=True)
class AccuracyPolicy:
    """Relative tolerance and term budget for series/continued fractions."""

    rel_tol: float = 1e-12
    max_terms: int = 500

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1e-6:
            raise DomainError(f"rel_tol must lie in (0, 1e-6), got {self.rel_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 50:
            raise DomainError(f"max_terms must be an integer >= 50, got {self.max_terms}")


DEFAULT_POLICY = AccuracyPolicy()


def _finite_real(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _half_integer_index(order):
    """Return n when order == n + 1/2 for an integer n >= 0, else None."""
    twice = 2.0 * order
    if twice == math.floor(twice) and int(twice) % 2 == 1:
        return (int(twice) - 1) // 2
    return None


def _half_integer_log_poly(n, x):
    # log of sum_{k=0}^{n} (n+k)! / (k! (n-k)! (2x)^k), all terms positive
    coeffs = [
        math.factorial(n + k) / (math.factorial(k) * math.factorial(n - k) * 2.0**k)
        for k in range(n + 1)
    ]
    inv = 1.0 / x
    acc = np.zeros_like(x) + coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * inv + c
    return np.log(acc)


def log_bessel_k_scaled(order, x):
    """``log(exp(x) * K_order(x))`` for ``order >= 0`` and ``x > 0``.

    Accepts scalars or arrays for ``x``. The scaled form never overflows or
    underflows for arguments in the double range, which lets callers combine
    ``exp(lambda*u) * K(u*rho)`` as ``exp(-u*(rho - lambda))`` in log space.
    """
    order = float(order)
    if not math.isfinite(order) or order < 0:
        raise DomainError(f"Bessel order must be finite and >= 0, got {order}")
    x = _finite_real("x", x)
    if np.any(x <= 0):
        raise DomainError("Bessel K requires x > 0")
    n = _half_integer_index(order)
    if n is not None:
        out = 0.5 * np.log(np.pi / (2.0 * x)) + _half_integer_log_poly(n, x)
    else:
        # kve returns nan for subnormal orders; K is even and smooth in the order
        out = np.log(sc.kve(order if order > 1e-300 else 0.0, x))
    return out if out.ndim else float(out)


def log_bessel_k(order, x):
    """``log K_order(x)``."""
    out = np.asarray(log_bessel_k_scaled(order, x)) - np.asarray(x, dtype=float)
    return out if out.ndim else float(out)


def bessel_k(order, x):
    """Modified Bessel function of the second kind ``K_order(x)``.

    Half-integer orders use the terminating closed form
    ``sqrt(pi/2x) e^{-x} sum_k (n+k)!/(k!(n-k)!(2x)^k)``; other orders use
    :func:`scipy.special.kve`.

    Raises
    ------
    DomainError
        If ``x <= 0``, ``order < 0`` or either argument is not finite.
    """
    val = np.exp(log_bessel_k(order, x))
    return val if np.ndim(val) else float(val)


def digamma(x):
    """Digamma function; raises at the poles ``0, -1, -2, ...``."""
    x = float(_finite_real("x", x))
    if x <= 0 and x == math.floor(x):
        raise DomainError(f"digamma has a pole at {x}")
    return float(sc.psi(x))


def log_gamma(x):
    """``log Gamma(x)`` for ``x > 0``."""
    x = float(_finite_real("x", x))
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return float(sc.gammaln(x))


def exp_integral_ei(x):
    """Exponential integral ``Ei(x)`` (principal value for ``x > 0``).

    On the negative axis the real branch ``Ei(x) = -E1(-x)`` is used.
    """
    x = float(_finite_real("x", x))
    if x == 0:
        raise DomainError("Ei is singular at x = 0")
    if x < 0:
        return -exp_integral_e1(-x)
    return float(sc.expi(x))


def exp_integral_e1(x):
    """``E1(x) = int_x^inf e^{-t}/t dt`` for ``x > 0``."""
    x = float(_finite_real("x", x))
    if x <= 0:
        raise DomainError(f"E1 requires x > 0, got {x}")
    if x < 2.0:
        return float(sc.exp1(x))
    return scaled_e1(x) * math.exp(-x)


def scaled_e1(x, policy=DEFAULT_POLICY):
    """``exp(x) * E1(x)`` for ``x > 0`` without overflow.

    For ``x >= 2`` the continued fraction
    ``1/(x+1- 1/(x+3- 4/(x+5- ...)))`` is evaluated by the modified Lentz
    method; smaller arguments use the unscaled scipy value. Lentz's stopping
    test measures the last update only, so it is run well below ``rel_tol``.
    """
    x = float(_finite_real("x", x))
    if x <= 0:
        raise DomainError(f"E1 requires x > 0, got {x}")
    if x < 2.0:
        return float(math.exp(x) * sc.exp1(x))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, policy.max_terms + 1):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-3 * policy.rel_tol:
            return h
    raise ConvergenceError(f"E1 continued fraction did not converge at x={x}")


def sphere_surface_area(p):
    """Surface measure ``2 pi^{p/2} / Gamma(p/2)`` of the unit sphere in R^p."""
    if int(p) != p or p < 1:
        raise DomainError(f"dimension must be an integer >= 1, got {p}")
    p = int(p)
    return float(2.0 * math.pi ** (p / 2.0) / math.gamma(p / 2.0))
