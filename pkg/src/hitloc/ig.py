"""Inverse-Gaussian law of the first-hitting time T.

``T ~ IG(nu, kappa)`` with mean ``nu`` and shape ``kappa``. For a drifted
Brownian motion started at distance ``lambda`` from the boundary,
``nu = lambda / mu`` and ``kappa = lambda**2 / sigma2`` with ``mu = u * sigma2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from hitloc._runtime import chunk_sizes, pmap, stream
from hitloc.errors import ConvergenceError, DomainError

__all__ = [
    "IgParams",
    "PhysicalTransport",
    "ig_from_physical",
    "ig_pdf",
    "ig_logpdf",
    "ig_sample",
    "draw_ig",
    "ig_laplace",
    "levy_laplace",
    "ig_expectation",
    "ig_mean_log",
    "ig_mean_abs_log",
    "ig_mean_inverse",
    "ig_entropy",
]


@dataclass(frozen=True)
class IgParams:
    """Mean ``nu`` and shape ``kappa`` of an inverse-Gaussian law."""

    nu: float
    kappa: float

    def __post_init__(self):
        for name in ("nu", "kappa"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v}")

    @property
    def variance(self):
        return self.nu**3 / self.kappa


@dataclass(frozen=True)
class PhysicalTransport:
    """Physical drift-diffusion setup.

    ``lam`` is the boundary separation, ``u = mu / sigma2`` the normalized
    drift (its sign gives the direction) and ``sigma2`` the diffusion
    coefficient.
    """

    lam: float
    u: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError(f"lam must be > 0, got {self.lam}")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise DomainError(f"sigma2 must be > 0, got {self.sigma2}")
        if not math.isfinite(self.u):
            raise DomainError("u must be finite")

    @property
    def mu(self):
        return self.u * self.sigma2


def ig_from_physical(phys):
    """Map a transport setup with ``u > 0`` to the hitting-time law."""
    if phys.u <= 0:
        raise DomainError("hitting time is defective or degenerate unless u > 0")
    return IgParams(nu=phys.lam / phys.mu, kappa=phys.lam**2 / phys.sigma2)


def _positive_times(t):
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t <= 0):
        raise DomainError("IG density requires finite t > 0")
    return t


def ig_logpdf(params, t):
    """Log density of ``IG(nu, kappa)`` at ``t > 0``."""
    t = _positive_times(t)
    nu, kappa = params.nu, params.kappa
    # (t - nu)^2 / (nu^2 t) written with expm1 to stay accurate near t = nu
    rel = np.expm1(np.log(t) - math.log(nu))
    out = 0.5 * np.log(kappa / (2.0 * math.pi)) - 1.5 * np.log(t) - 0.5 * kappa * rel**2 / t
    return out if out.ndim else float(out)


def ig_pdf(params, t):
    """Density ``sqrt(kappa/(2 pi t^3)) exp(-kappa (t-nu)^2 / (2 nu^2 t))``."""
    out = np.exp(ig_logpdf(params, t))
    return out if np.ndim(out) else float(out)


def draw_ig(rng, nu, kappa, size):
    """Michael-Schucany-Haas draws from ``IG(nu, kappa)`` using ``rng``.

    The smaller root of the quadratic is written as ``nu / (1 + a + sqrt(a^2 + 2a))``
    which avoids the cancellation of the textbook form when ``nu/kappa`` is large.
    """
    z = rng.standard_normal(size)
    a = nu * z * z / (2.0 * kappa)
    x = nu / (1.0 + a + np.sqrt(a * a + 2.0 * a))
    pick = rng.random(size) * (nu + x) <= nu
    return np.where(pick, x, nu * nu / x)


def ig_sample(params, count, seed, chunk=0):
    """``count`` i.i.d. draws from ``IG(nu, kappa)``, deterministic in ``seed``.

    Large requests are split into fixed-size chunks, each drawn from its own
    ``(seed, chunk)`` stream, so the output does not depend on thread count.
    """
    if int(count) != count or count < 1:
        raise DomainError(f"count must be a positive integer, got {count}")
    sizes = chunk_sizes(count)
    base = int(chunk) * 1_000_000

    def work(i):
        return draw_ig(stream(seed, base + i), params.nu, params.kappa, sizes[i])

    return np.concatenate(pmap(work, range(len(sizes))))


def ig_laplace(params, s):
    """Laplace transform ``E[exp(-sT)] = exp((kappa/nu)(1 - sqrt(1 + 2 nu^2 s / kappa)))``."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(~np.isfinite(s)):
        raise DomainError("Laplace argument must be finite and >= 0")
    q = 2.0 * params.nu**2 * s / params.kappa
    # (1 - sqrt(1+q)) = -q / (1 + sqrt(1+q))
    out = np.exp(-(params.kappa / params.nu) * q / (1.0 + np.sqrt(1.0 + q)))
    return out if out.ndim else float(out)


def levy_laplace(kappa, s):
    """``exp(-sqrt(2 kappa s))``: the ``nu -> inf`` limit of :func:`ig_laplace`."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("Laplace argument must be >= 0")
    out = np.exp(-np.sqrt(2.0 * kappa * s))
    return out if out.ndim else float(out)


def _log_density_in_log_time(params, y):
    """Log density of ``Y = log T``."""
    nu, kappa = params.nu, params.kappa
    rel = np.expm1(y - math.log(nu))
    return 0.5 * math.log(kappa / (2.0 * math.pi)) - 0.5 * y - 0.5 * kappa * np.exp(-y) * rel**2


def _log_time_window(params, margin=60.0):
    """Mode of ``log T`` and a bracket outside which its density is negligible."""
    nu, kappa = params.nu, params.kappa
    a = kappa / (2.0 * nu * nu)
    b = kappa / 2.0
    mode = math.log(2.0 * b / (0.5 + math.sqrt(0.25 + 4.0 * a * b)))
    peak = _log_density_in_log_time(params, mode)

    def edge(direction):
        step = 1.0
        while True:
            y = mode + direction * step
            if _log_density_in_log_time(params, y) < peak - margin:
                return y
            step *= 1.5
            if step > 1e4:
                raise ConvergenceError("could not bracket the IG density")

    return edge(-1.0), mode, edge(1.0)


def ig_expectation(params, fn, tol=1e-10, limit=400):
    """``E[fn(log T)]`` by adaptive Gauss-Kronrod quadrature over ``y = log T``.

    ``fn`` receives the log-time ``y``. The integral is split at the mode of
    ``log T`` and at ``log nu``; the integrand decays doubly exponentially at
    both ends, so a finite bracket at 60 nats below the peak loses nothing.

    Returns
    -------
    (value, abserr)
    """
    lo, mode, hi = _log_time_window(params)
    cuts = sorted({lo, mode, min(max(math.log(params.nu), lo), hi), hi})

    def integrand(y):
        return fn(y) * math.exp(_log_density_in_log_time(params, y))

    total = 0.0
    err = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        val, e = integrate.quad(integrand, a, b, epsabs=tol / 4.0, epsrel=1e-13, limit=limit)
        total += val
        err += e
    if err > tol:
        raise ConvergenceError(f"IG expectation error estimate {err:.3g} exceeds tol {tol:.3g}")
    return total, err


def ig_mean_log(params, tol=1e-10):
    """``E[log T]``; never exceeds ``log nu`` (Jensen)."""
    return ig_expectation(params, lambda y: y, tol)[0]


def ig_mean_abs_log(params, tol=1e-10):
    """``E[|log T|]``, finite for every proper IG law."""
    return ig_expectation(params, abs, tol)[0]


def ig_mean_inverse(params):
    """``E[1/T] = 1/nu + 1/kappa``."""
    return 1.0 / params.nu + 1.0 / params.kappa


def ig_entropy(params, tol=1e-10):
    """Differential entropy of ``T`` from the expanded log-density.

    ``h(T) = -log C + 1.5 E[log T] + kappa/(2 nu) + (kappa/2) E[1/T]`` with
    ``C = sqrt(kappa / 2 pi) exp(kappa / nu)``. The ``kappa/nu`` pieces cancel
    analytically and are dropped to keep precision when ``kappa/nu`` is large.
    """
    kappa = params.kappa
    # -kappa/nu + kappa/(2 nu) + (kappa/2)(1/nu + 1/kappa) = 1/2
    return -0.5 * math.log(kappa / (2.0 * math.pi)) + 0.5 + 1.5 * ig_mean_log(params, tol)
