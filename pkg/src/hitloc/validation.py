"""Statistical and path-level oracles for the NDFHL family.

The checks here do not reuse the analytic formulas they test. Hit times and
locations come from a raw Euler-Maruyama simulation of the drift-diffusion.
Distribution claims are gated on empirical characteristic functions with a
``gate / sqrt(count)`` threshold (``gate = 4``). A negative control is a
deliberately wrong hypothesis and must fail its gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from hitloc import io
from hitloc._runtime import pmap, stream
from hitloc.entropy import entropy_quadrature
from hitloc.errors import DomainError, NonTerminationError
from hitloc.ig import IgParams, PhysicalTransport, ig_from_physical, ig_laplace, ig_sample
from hitloc.ndfhl import NdfhlParams, SampleBatch, cauchy_entropy, cf, cf_radial, sample

__all__ = [
    "SdeConfig",
    "ValidationReport",
    "GATE",
    "omega_grid",
    "empirical_cf",
    "sde_hitting_sample",
    "sde_checks",
    "empirical_cf_check",
    "two_sample_cf_check",
    "convolution_closure_check",
    "divisibility_check",
    "cauchy_limit_sweep",
    "negate",
    "run_suite",
    "write_reports_jsonl",
]

GATE = 4.0
_SDE_CHUNK = 25_000


@dataclass(frozen=True)
class SdeConfig:
    """Euler-Maruyama setup: ``dt`` defaults to ``1e-3 * nu``, ``max_steps`` to ``50 nu / dt``."""

    phys: PhysicalTransport
    dt: float | None = None
    max_steps: int | None = None
    bridge_correction: bool = True
    d: int = 3

    def __post_init__(self):
        if self.phys.u <= 0:
            raise DomainError("path simulation needs u > 0")
        nu = ig_from_physical(self.phys).nu
        if self.dt is None:
            object.__setattr__(self, "dt", 1e-3 * nu)
        if not self.dt > 0:
            raise DomainError("dt must be > 0")
        if self.max_steps is None:
            object.__setattr__(self, "max_steps", int(math.ceil(50.0 * nu / self.dt)))
        if self.max_steps < 1:
            raise DomainError("max_steps must be >= 1")
        if int(self.d) != self.d or self.d < 2:
            raise DomainError("d must be an integer >= 2")

    @property
    def params(self):
        return NdfhlParams(self.d, self.phys.lam, self.phys.u)


@dataclass
class ValidationReport:
    """One gate: ``passed`` is exactly ``statistic <= threshold``."""

    check_name: str
    statistic: float
    threshold: float
    metadata: dict = field(default_factory=dict)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.statistic = float(self.statistic)
        self.threshold = float(self.threshold)
        self.passed = bool(self.statistic <= self.threshold)

    def record(self):
        return {
            "check_name": self.check_name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "pass": self.passed,
            "metadata": self.metadata,
        }


def negate(report):
    """Wrap a negative control: passes iff the wrapped check failed."""
    return ValidationReport(
        f"negative_control:{report.check_name}",
        report.threshold,
        report.statistic,
        {**report.metadata, "inner_statistic": report.statistic, "inner_threshold": report.threshold},
    )


def omega_grid(p, n=20, lo=0.1, hi=5.0):
    """``n`` frequencies with norms evenly spaced in ``[lo, hi]``, fixed directions."""
    rng = stream(0x5EED, 0)
    dirs = rng.standard_normal((n, p))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return dirs * np.linspace(lo, hi, n)[:, None]


def empirical_cf(points, omegas, block=200_000):
    """Real part of the empirical CF, ``mean_i cos<omega, x_i>``, per omega."""
    points = np.asarray(points, dtype=float)
    acc = np.zeros(len(omegas))
    for start in range(0, len(points), block):
        acc += np.cos(points[start : start + block] @ omegas.T).sum(axis=0)
    return acc / len(points)


def _simulate_chunk(cfg, m, rng):
    lam, mu = cfg.phys.lam, cfg.phys.mu
    sig = math.sqrt(cfg.phys.sigma2)
    dt, p = cfg.dt, cfg.d - 1
    sdt = sig * math.sqrt(dt)
    x = np.zeros(m)
    y = np.zeros((m, p))
    idx = np.arange(m)
    times = np.full(m, np.nan)
    locs = np.full((m, p), np.nan)
    for k in range(cfg.max_steps):
        if idx.size == 0:
            break
        n = idx.size
        x_new = x + mu * dt + sdt * rng.standard_normal(n)
        dy = sdt * rng.standard_normal((n, p))
        over = x_new >= lam
        frac = np.where(over, (lam - x) / np.where(over, x_new - x, 1.0), 0.5)
        hit = over
        if cfg.bridge_correction:
            # P(max of the Brownian bridge from x to x_new exceeds lam)
            gap = np.maximum(lam - x, 0.0) * np.maximum(lam - x_new, 0.0)
            cross = rng.random(n) < np.exp(-2.0 * gap / (sig * sig * dt))
            hit = over | cross
        if hit.any():
            h = idx[hit]
            times[h] = (k + frac[hit]) * dt
            locs[h] = y[hit] + frac[hit, None] * dy[hit]
        keep = ~hit
        idx, x, y = idx[keep], x_new[keep], y[keep] + dy[keep]
    return times, locs


def sde_hitting_sample(cfg, count, seed):
    """Simulate ``count`` paths until they first reach ``x1 = lam``.

    Returns ``(times, batch)`` with hit times and transverse hit locations.
    With ``bridge_correction`` each step also hits with the Brownian-bridge
    crossing probability ``exp(-2 (lam - x)(lam - x') / (sigma2 dt))``.
    Paths still running after ``max_steps`` are dropped.

    Raises
    ------
    NonTerminationError
        If more than 0.1 % of the paths never hit.
    """
    if int(count) != count or count < 1:
        raise DomainError("count must be a positive integer")
    sizes = [_SDE_CHUNK] * (count // _SDE_CHUNK) + ([count % _SDE_CHUNK] if count % _SDE_CHUNK else [])
    parts = pmap(lambda i: _simulate_chunk(cfg, sizes[i], stream(seed, i)), range(len(sizes)))
    times = np.concatenate([t for t, _ in parts])
    locs = np.concatenate([loc for _, loc in parts], axis=0)
    ok = np.isfinite(times)
    missing = int(count - ok.sum())
    if missing > 1e-3 * count:
        raise NonTerminationError(f"{missing} of {count} paths did not hit within max_steps")
    return times[ok], SampleBatch(locs[ok], cfg.params, int(seed))


def _var_se(x):
    c = x - x.mean()
    m2 = np.mean(c * c)
    m4 = np.mean(c**4)
    return float(np.var(x, ddof=1)), float(math.sqrt(max(m4 - m2 * m2, 0.0) / x.size))


def sde_checks(cfg, count, seed, gate=GATE):
    """Compare simulated hit times/locations with the IG / NDFHL predictions.

    The discretization allowance is ``2 dt`` (``2 sigma2 dt`` for spatial
    variances), added to ``gate`` standard errors.
    """
    times, batch = sde_hitting_sample(cfg, count, seed)
    law = ig_from_physical(cfg.phys)
    n = times.size
    meta = {"lambda": cfg.phys.lam, "u": cfg.phys.u, "sigma2": cfg.phys.sigma2, "dt": cfg.dt,
            "paths": n, "bridge": cfg.bridge_correction}
    allow = 2.0 * cfg.dt
    reports = []
    se_mean = float(times.std(ddof=1) / math.sqrt(n))
    reports.append(ValidationReport(
        "sde_hit_time_mean", abs(times.mean() - law.nu), gate * se_mean + allow,
        {**meta, "estimate": float(times.mean()), "expected": law.nu}))
    v, se_v = _var_se(times)
    reports.append(ValidationReport(
        "sde_hit_time_variance", abs(v - law.variance), gate * se_v + allow,
        {**meta, "estimate": v, "expected": law.variance}))
    target = cfg.phys.lam / cfg.phys.u
    for i in range(batch.params.p):
        vi, se_vi = _var_se(batch.points[:, i])
        reports.append(ValidationReport(
            f"sde_location_variance_axis{i + 1}", abs(vi - target),
            gate * se_vi + allow * cfg.phys.sigma2,
            {**meta, "estimate": vi, "expected": target}))
    ecf = empirical_cf_check(batch, batch.params, gate=gate)
    ecf.check_name = "sde_location_cf"
    reports.append(ecf)
    ref = sample(batch.params, n, seed, chunk=7)
    reports.append(two_sample_cf_check(batch.points, ref.points, gate=gate, name="sde_vs_mixture_cf"))
    return reports


def empirical_cf_check(batch, params, omegas=None, gate=GATE):
    """Max deviation of the empirical CF from the closed form, gated at ``gate/sqrt(n)``."""
    if omegas is None:
        omegas = omega_grid(params.p)
    ecf = empirical_cf(batch.points, omegas)
    stat = float(np.max(np.abs(ecf - cf(params, omegas))))
    return ValidationReport(
        "empirical_cf", stat, gate / math.sqrt(batch.count),
        {"d": params.d, "lambda": params.lam, "u": params.u, "count": batch.count,
         "sample_params": batch.metadata()},
    )


def two_sample_cf_check(points_a, points_b, omegas=None, gate=GATE, name="two_sample_cf"):
    """Max gap between two empirical CFs on a shared grid."""
    points_a = np.asarray(points_a, dtype=float)
    points_b = np.asarray(points_b, dtype=float)
    if omegas is None:
        omegas = omega_grid(points_a.shape[1])
    stat = float(np.max(np.abs(empirical_cf(points_a, omegas) - empirical_cf(points_b, omegas))))
    thr = gate * math.sqrt(1.0 / len(points_a) + 1.0 / len(points_b))
    return ValidationReport(name, stat, thr, {"count_a": len(points_a), "count_b": len(points_b)})


def convolution_closure_check(lam1, lam2, u, d, count, seed, target_lam=None, gate=GATE):
    """Sum of NDFHL(lam1, u) and NDFHL(lam2, u) draws against NDFHL(target_lam, u)."""
    if u <= 0:
        raise DomainError("closure check needs u > 0")
    target = NdfhlParams(d, lam1 + lam2 if target_lam is None else target_lam, u)
    a = sample(NdfhlParams(d, lam1, u), count, seed, chunk=0)
    b = sample(NdfhlParams(d, lam2, u), count, seed, chunk=1)
    summed = SampleBatch(a.points + b.points, target, int(seed))
    rep = empirical_cf_check(summed, target, gate=gate)
    rep.check_name = f"convolution_closure[{lam1}+{lam2}->{target.lam}]"
    return rep


def divisibility_check(params, k, count, seed, target=None, gate=GATE):
    """Sum of ``k`` NDFHL(lam/k, u) batches against ``target`` (default ``params``)."""
    if int(k) != k or k < 2:
        raise DomainError("k must be an integer >= 2")
    piece = NdfhlParams(params.d, params.lam / k, params.u)
    total = sum(sample(piece, count, seed, chunk=j).points for j in range(int(k)))
    target = params if target is None else target
    rep = empirical_cf_check(SampleBatch(total, target, int(seed)), target, gate=gate)
    rep.check_name = f"divisibility[k={k}]"
    return rep


def cauchy_limit_sweep(d, lam, u_list, tol=1e-8, final_entropy_gap=0.05):
    """Entropy and CF distance to the Cauchy limit along a decreasing ``u`` list.

    Each entropy report's threshold is the previous distance, so the report
    fails unless the distance shrinks. The last one is also capped at
    ``final_entropy_gap``. CF distances are sup-norms over ``||omega|| in [0.1, 5]``.
    """
    u_list = [float(u) for u in u_list]
    if any(u <= 0 for u in u_list):
        raise DomainError("sweep values must be > 0")
    p = int(d) - 1
    g = cauchy_entropy(p, lam)
    ws = np.linspace(0.1, 5.0, 20)
    limit_cf = np.exp(-lam * ws)
    ent = pmap(lambda u: abs(entropy_quadrature(NdfhlParams(d, lam, u), tol).value - g), u_list)
    cfd = [float(np.max(np.abs(cf_radial(NdfhlParams(d, lam, u), ws) - limit_cf))) for u in u_list]
    reports = []
    last = len(u_list) - 1
    for i, u in enumerate(u_list):
        # the first point has nothing to improve on and is its own baseline
        prev_e, prev_c = (ent[i - 1], cfd[i - 1]) if i else (ent[i], cfd[i])
        thr = min(prev_e, final_entropy_gap) if i == last else prev_e
        meta = {"d": int(d), "lambda": lam, "u": u, "g_p": g, "baseline": i == 0}
        reports.append(ValidationReport(f"cauchy_limit_entropy[d={d},u={u:g}]", ent[i], thr, meta))
        reports.append(ValidationReport(f"cauchy_limit_cf[d={d},u={u:g}]", cfd[i], prev_c, meta))
    return reports


def _ig_laplace_checks(law, count, seed, gate=GATE):
    t = ig_sample(law, count, seed)
    out = []
    for s in (0.1, 1.0, 10.0):
        v = np.exp(-s * t)
        se = float(v.std(ddof=1) / math.sqrt(count))
        out.append(ValidationReport(
            f"ig_laplace[s={s:g}]", abs(v.mean() - ig_laplace(law, s)), gate * se,
            {"nu": law.nu, "kappa": law.kappa, "count": count}))
    return out


def run_suite(seed=7, count=200_000, sde_paths=20_000):
    """Full gate list used by ``hitloc validate``; every report must pass."""
    reports = []
    settings = [(2, 1.0, 1.0), (3, 1.0, 1.0), (3, 2.0, 4.0), (4, 1.0, 0.5), (3, 0.5, 0.2), (2, 2.0, 5.0)]
    for j, (d, lam, u) in enumerate(settings):
        prm = NdfhlParams(d, lam, u)
        reports.append(empirical_cf_check(sample(prm, count, seed, chunk=10 + j), prm))
    b = sample(NdfhlParams(3, 1.0, 1.0), count, seed, chunk=20)
    reports.append(negate(empirical_cf_check(b, NdfhlParams(3, 1.0, 2.0))))
    reports.append(convolution_closure_check(0.5, 0.5, 1.0, 3, count, seed + 1))
    reports.append(convolution_closure_check(1.0, 2.0, 1.0, 2, count, seed + 2))
    reports.append(negate(convolution_closure_check(1.0, 2.0, 1.0, 2, count, seed + 3, target_lam=2.5)))
    base = NdfhlParams(3, 1.0, 1.0)
    reports.append(divisibility_check(base, 2, count, seed + 4))
    reports.append(divisibility_check(base, 5, count, seed + 5))
    reports.append(negate(divisibility_check(base, 2, count, seed + 6, target=NdfhlParams(3, 1.0, 2.0))))
    for d in (2, 3, 4):
        reports.extend(cauchy_limit_sweep(d, 1.0, [1.0, 0.1, 0.01, 0.001]))
    reports.extend(_ig_laplace_checks(IgParams(1.0, 1.0), count, seed + 8))
    cfg = SdeConfig(PhysicalTransport(1.0, 1.0, 1.0), dt=1e-3, d=3)
    reports.extend(sde_checks(cfg, sde_paths, seed + 9))
    return reports


def write_reports_jsonl(fh, reports):
    io.write_jsonl(fh, [r.record() for r in reports])
