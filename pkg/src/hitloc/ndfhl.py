"""The NDFHL(d, lambda, u) first-hitting-location family on R^p, p = d - 1.

A particle released at distance ``lam`` from an absorbing hyperplane in R^d,
drifting toward it with normalized speed ``u = mu / sigma2``, lands at a
transverse position ``N``. Its law is the Gaussian variance mixture
``N = sqrt(T) Z`` with ``T ~ IG(lam/u, lam^2)`` in the ``sigma = 1`` gauge, which
is lossless because the marginal law depends on ``(lam, u)`` only.

``u = 0`` is handled as its own branch: the isotropic multivariate Cauchy
law with scale ``lam``. Moments that diverge there raise :class:`DomainError`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hitloc import io
from hitloc._runtime import chunk_sizes, pmap, stream
from hitloc.errors import DomainError
from hitloc.ig import IgParams, draw_ig
from hitloc.special import digamma, log_bessel_k_scaled, log_gamma

__all__ = [
    "NdfhlParams",
    "SignedDriftParams",
    "SampleBatch",
    "NigParams",
    "rho",
    "log_pdf_radial",
    "pdf",
    "cauchy_pdf",
    "cauchy_log_pdf_radial",
    "pdf_dispatch",
    "cf",
    "cf_radial",
    "mixing_law",
    "sample",
    "mean",
    "covariance",
    "hit_probability",
    "defective_pdf",
    "cauchy_entropy",
    "nig_identification",
]


@dataclass(frozen=True)
class NdfhlParams:
    """Ambient dimension ``d >= 2``, separation ``lam > 0``, drift ``u >= 0``."""

    d: int
    lam: float
    u: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"d must be an integer >= 2, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError(f"lam must be finite and > 0, got {self.lam}")
        if not (math.isfinite(self.u) and self.u >= 0):
            raise DomainError(f"u must be finite and >= 0, got {self.u}")

    @property
    def p(self):
        """Dimension of the receiving hyperplane."""
        return self.d - 1

    def require_drift(self):
        if self.u <= 0:
            raise DomainError("this quantity requires u > 0 (u = 0 is the Cauchy limit)")
        return self


@dataclass(frozen=True)
class SignedDriftParams:
    """A drift of either sign; ``base`` carries ``|u_signed|``."""

    base: NdfhlParams
    u_signed: float

    def __post_init__(self):
        if self.base.u != abs(self.u_signed):
            raise DomainError("base.u must equal |u_signed|")

    @classmethod
    def of(cls, d, lam, u_signed):
        return cls(NdfhlParams(d, lam, abs(u_signed)), float(u_signed))


@dataclass(frozen=True)
class NigParams:
    """Isotropic normal-inverse-Gaussian parameters matching an NDFHL law."""

    alpha: float
    beta: np.ndarray
    delta: float
    mu: np.ndarray
    dispersion: np.ndarray
    bessel_order: float


@dataclass
class SampleBatch:
    """Draws in R^p together with the inputs that generated them."""

    points: np.ndarray
    params: NdfhlParams
    seed: int
    count: int = field(default=-1)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != self.params.p:
            raise DomainError(f"points must have shape (count, {self.params.p})")
        if self.count == -1:
            self.count = self.points.shape[0]
        if self.count != self.points.shape[0]:
            raise DomainError("count does not match the number of rows")

    def metadata(self):
        return {
            "d": self.params.d,
            "lambda": self.params.lam,
            "u": self.params.u,
            "seed": self.seed,
            "count": self.count,
        }

    def write_csv(self, fh):
        header = [f"x{i + 1}" for i in range(self.params.p)]
        io.write_csv(fh, header, self.points.tolist())

    def save(self, csv_path, meta_path=None):
        """Write ``csv_path`` and the JSON sidecar (default: same stem, ``.json``)."""
        csv_path = Path(csv_path)
        meta_path = Path(meta_path) if meta_path else csv_path.with_suffix(".json")
        with io.open_text(csv_path) as fh:
            self.write_csv(fh)
        with io.open_text(meta_path) as fh:
            io.write_json(fh, self.metadata())
        return csv_path, meta_path

    @classmethod
    def load(cls, csv_path, meta_path=None):
        csv_path = Path(csv_path)
        meta_path = Path(meta_path) if meta_path else csv_path.with_suffix(".json")
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        params = NdfhlParams(meta["d"], meta["lambda"], meta["u"])
        pts = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
        return cls(pts.reshape(-1, params.p), params, int(meta["seed"]), int(meta["count"]))


def _norms(p, n):
    """Euclidean norms of point(s) ``n`` whose last axis has length ``p``."""
    n = np.asarray(n, dtype=float)
    if not np.all(np.isfinite(n)):
        raise DomainError("points must be finite")
    if n.ndim == 0:
        if p != 1:
            raise DomainError(f"a scalar point is only valid for p = 1 (p = {p})")
        return np.abs(n)
    if n.shape[-1] != p:
        raise DomainError(f"points must have last dimension {p}, got {n.shape[-1]}")
    return np.linalg.norm(n, axis=-1)


def _out(x):
    return x if np.ndim(x) else float(x)


def rho(lam, r):
    """Distance ``sqrt(r^2 + lam^2)`` from the release point to a boundary point."""
    return np.hypot(r, lam)


def cauchy_log_pdf_radial(p, lam, r):
    """Log density of the isotropic Cauchy law on R^p at radius ``r``."""
    r = np.asarray(r, dtype=float)
    h = 0.5 * (p + 1)
    return _out(
        log_gamma(h) - h * math.log(math.pi) - p * math.log(lam) - h * np.log1p((r / lam) ** 2)
    )


def cauchy_pdf(p, lam, x):
    """Isotropic multivariate Cauchy density with scale ``lam`` on R^p."""
    if int(p) != p or p < 1:
        raise DomainError("p must be an integer >= 1")
    if not lam > 0:
        raise DomainError("lam must be > 0")
    return _out(np.exp(cauchy_log_pdf_radial(int(p), lam, _norms(int(p), x))))


def log_pdf_radial(params, r):
    """Log density at transverse radius ``r >= 0`` (either branch).

    For ``u > 0`` the Bessel form is evaluated as
    ``log K_{d/2}^{scaled}(u rho) - u (rho - lam)``, so ``e^{lam u}`` never
    appears on its own; ``d = 3`` uses the elementary form.
    """
    r = np.asarray(r, dtype=float)
    lam, u, d = params.lam, params.u, params.d
    if u == 0:
        return cauchy_log_pdf_radial(params.p, lam, r)
    rh = rho(lam, r)
    excess = r * r / (rh + lam)  # rho - lam without cancellation
    if d == 3:
        out = math.log(lam / (2.0 * math.pi)) - 3.0 * np.log(rh) + np.log1p(u * rh) - u * excess
    else:
        h = 0.5 * d
        out = (
            math.log(lam)
            - (h - 1.0) * math.log(2.0)
            - h * math.log(math.pi)
            + h * (math.log(u) - np.log(rh))
            + log_bessel_k_scaled(h, u * rh)
            - u * excess
        )
    return _out(out)


def pdf(params, n):
    """NDFHL density at point(s) ``n`` in R^p; requires ``u > 0``."""
    params.require_drift()
    return _out(np.exp(log_pdf_radial(params, _norms(params.p, n))))


def pdf_dispatch(params, n):
    """Density for any ``u >= 0``; ``u = 0`` goes to the Cauchy branch."""
    if params.u == 0:
        return cauchy_pdf(params.p, params.lam, n)
    return pdf(params, n)


def cf_radial(params, w):
    """``exp(-lam (sqrt(u^2 + w^2) - u))`` at frequency norm ``w``."""
    w = np.asarray(w, dtype=float)
    u = params.u
    # sqrt(u^2 + w^2) - u = w^2 / (sqrt(u^2 + w^2) + u)
    s = np.hypot(u, w)
    expo = np.where(s > 0, w * w / np.where(s > 0, s + u, 1.0), 0.0)
    return _out(np.exp(-params.lam * expo))


def cf(params, omega):
    """Characteristic function at ``omega`` in R^p (real by symmetry)."""
    return cf_radial(params, _norms(params.p, omega))


def mixing_law(params):
    """Hitting-time law ``IG(lam/u, lam^2)`` in the ``sigma = 1`` gauge."""
    params.require_drift()
    return IgParams(nu=params.lam / params.u, kappa=params.lam**2)


def sample(params, count, seed, chunk=0):
    """Draw ``count`` points as ``sqrt(T) Z``, deterministic in ``seed``.

    Each fixed-size chunk draws from its own ``(seed, chunk)`` stream, so
    output is independent of the thread count.
    """
    law = mixing_law(params)
    if int(count) != count or count < 1:
        raise DomainError(f"count must be a positive integer, got {count}")
    sizes = chunk_sizes(count)
    base = int(chunk) * 1_000_000
    p = params.p

    def work(i):
        rng = stream(seed, base + i)
        t = draw_ig(rng, law.nu, law.kappa, sizes[i])
        z = rng.standard_normal((sizes[i], p))
        return np.sqrt(t)[:, None] * z

    pts = np.concatenate(pmap(work, range(len(sizes))), axis=0)
    return SampleBatch(pts, params, int(seed), int(count))


def mean(params):
    params.require_drift()
    return np.zeros(params.p)


def covariance(params):
    """``(lam / u) I_p``; infinite at ``u = 0``."""
    params.require_drift()
    return (params.lam / params.u) * np.eye(params.p)


def hit_probability(lam, u_signed):
    """``P(T < inf)``: 1 for ``u >= 0``, ``exp(-2 lam |u|)`` for reverse drift."""
    if not lam > 0:
        raise DomainError("lam must be > 0")
    if u_signed >= 0:
        return 1.0
    return math.exp(-2.0 * lam * abs(u_signed))


def defective_pdf(sp, n):
    """Sub-probability hitting density under reverse drift.

    Equal to ``hit_probability * pdf(|u|)``: reverse drift scales the arrival
    rate but leaves the spatial shape unchanged.
    """
    if sp.u_signed >= 0:
        raise DomainError("defective density requires u_signed < 0")
    return _out(hit_probability(sp.base.lam, sp.u_signed) * np.asarray(pdf(sp.base, n)))


def cauchy_entropy(p, lam):
    """Differential entropy (nats) of the isotropic Cauchy law on R^p."""
    if int(p) != p or p < 1:
        raise DomainError("p must be an integer >= 1")
    if not lam > 0:
        raise DomainError("lam must be > 0")
    h = 0.5 * (p + 1)
    return (
        h * math.log(math.pi)
        + p * math.log(lam)
        - log_gamma(h)
        + h * (digamma(h) - digamma(0.5))
    )


def nig_identification(params):
    """NIG parameters whose radial kernel matches this law (order ``d/2``)."""
    params.require_drift()
    p = params.p
    return NigParams(
        alpha=params.u,
        beta=np.zeros(p),
        delta=params.lam,
        mu=np.zeros(p),
        dispersion=np.eye(p),
        bessel_order=0.5 * (p + 1),
    )
