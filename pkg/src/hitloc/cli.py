"""``hitloc`` command line: data products as CSV / JSON on stdout or a file.

Exit status is 2 for bad flags or parameters, 1 when a validation gate
fails or a numerical routine does not converge, 0 otherwise.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from hitloc import io
from hitloc.capacity import capacity_table, offset_curve, write_capacity_csv, write_capacity_json
from hitloc.entropy import DEFAULT_TOL, SWEEP_HEADER, entropy_sweep
from hitloc.errors import ConvergenceError, DomainError, NonTerminationError
from hitloc.ndfhl import NdfhlParams, cf_radial, log_pdf_radial, sample
from hitloc.validation import run_suite, write_reports_jsonl


def parse_grid(text):
    """``log:lo:hi:n``, ``lin:lo:hi:n`` or a comma-separated list of numbers."""
    try:
        if text.startswith(("log:", "lin:")):
            kind, lo, hi, n = text.split(":")
            lo, hi, n = float(lo), float(hi), int(n)
            if n < 1:
                raise ValueError
            if kind == "log":
                if lo <= 0 or hi <= 0:
                    raise ValueError
                return np.geomspace(lo, hi, n).tolist()
            return np.linspace(lo, hi, n).tolist()
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; use log:lo:hi:n, lin:lo:hi:n or a,b,c")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}")


def _point(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad point {text!r}")


def _emit_table(args, header, rows):
    with io.open_text(args.output) as fh:
        if args.format == "json":
            io.write_json(fh, [dict(zip(header, r)) for r in rows])
        else:
            io.write_csv(fh, header, rows)


def cmd_pdf(args):
    prm = NdfhlParams(args.d, args.lam, args.u)
    if args.point is not None:
        if len(args.point) != prm.p:
            raise DomainError(f"--point needs {prm.p} coordinates")
        radii = [float(np.linalg.norm(args.point))]
    else:
        radii = args.r_grid
    if any(r < 0 for r in radii):
        raise DomainError("radii must be >= 0")
    vals = np.exp(np.atleast_1d(log_pdf_radial(prm, np.asarray(radii))))
    rows = [(prm.d, prm.lam, prm.u, r, float(v)) for r, v in zip(radii, vals)]
    _emit_table(args, ("d", "lambda", "u", "r", "pdf"), rows)


def cmd_cf(args):
    prm = NdfhlParams(args.d, args.lam, args.u)
    ws = args.omega_norm
    if any(w < 0 for w in ws):
        raise DomainError("frequency norms must be >= 0")
    vals = np.atleast_1d(cf_radial(prm, np.asarray(ws)))
    rows = [(prm.d, prm.lam, prm.u, w, float(v)) for w, v in zip(ws, vals)]
    _emit_table(args, ("d", "lambda", "u", "omega_norm", "cf"), rows)


def cmd_sample(args):
    batch = sample(NdfhlParams(args.d, args.lam, args.u), args.count, args.seed)
    if args.format == "json":
        with io.open_text(args.output) as fh:
            io.write_json(fh, {**batch.metadata(), "points": batch.points})
    elif args.output in (None, "-"):
        batch.write_csv(sys.stdout)
    else:
        batch.save(args.output)


def cmd_entropy_sweep(args):
    rows = entropy_sweep(args.d, args.lam, args.u_grid, args.tol)
    _emit_table(args, SWEEP_HEADER, rows)


def cmd_capacity(args):
    powers = [args.power] if args.power is not None else args.power_grid
    reports = capacity_table(NdfhlParams(args.d, args.lam, args.u), powers, args.tol)
    with io.open_text(args.output) as fh:
        (write_capacity_json if args.format == "json" else write_capacity_csv)(fh, reports)


def cmd_offset_curve(args):
    grid = list(args.u_grid)
    if 0.0 not in grid:
        grid.append(0.0)
    rows = [(args.d, args.lam, u, val) for u, val in offset_curve(args.d, args.lam, grid)]
    _emit_table(args, ("d", "lambda", "u", "offset"), rows)


def cmd_validate(args):
    reports = run_suite(args.seed, args.count, args.sde_paths)
    with io.open_text(args.output) as fh:
        write_reports_jsonl(fh, reports)
    failed = [r.check_name for r in reports if not r.passed]
    for name in failed:
        print(f"FAILED {name}", file=sys.stderr)
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="hitloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True, seed=False):
        p.add_argument("--output", "-o", default=None, help="file path; stdout when omitted")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    def model(p, u=True):
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--lambda", dest="lam", type=float, required=True)
        if u:
            p.add_argument("--u", type=float, required=True)

    p = sub.add_parser("pdf", help="density at a point or along a radius grid")
    model(p)
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--point", type=_point, help="comma-separated coordinates in R^p")
    where.add_argument("--r-grid", type=parse_grid)
    common(p)
    p.set_defaults(func=cmd_pdf)

    p = sub.add_parser("cf", help="characteristic function at frequency norms")
    model(p)
    p.add_argument("--omega-norm", type=parse_grid, required=True)
    common(p)
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("sample", help="draws as CSV plus a JSON sidecar")
    model(p)
    p.add_argument("--count", type=int, required=True)
    common(p, seed=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("entropy-sweep", help="h(N) over dimensions and a drift grid")
    p.add_argument("--d", type=_int_list, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--u-grid", type=parse_grid, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common(p)
    p.set_defaults(func=cmd_entropy_sweep)

    p = sub.add_parser("capacity", help="capacity bounds at one or more powers")
    model(p)
    power = p.add_mutually_exclusive_group(required=True)
    power.add_argument("--power", type=float)
    power.add_argument("--power-grid", type=parse_grid)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common(p)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("offset-curve", help="high-SNR offset L(u) with the u = 0 endpoint")
    model(p, u=False)
    p.add_argument("--u-grid", type=parse_grid, required=True)
    common(p)
    p.set_defaults(func=cmd_offset_curve)

    p = sub.add_parser("validate", help="run every statistical gate, JSON lines out")
    p.add_argument("--count", type=int, default=200_000)
    p.add_argument("--sde-paths", type=int, default=20_000)
    common(p, fmt=False, seed=True)
    p.set_defaults(func=cmd_validate, seed=7)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except DomainError as exc:
        print(f"hitloc: error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, NonTerminationError) as exc:
        print(f"hitloc: numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
