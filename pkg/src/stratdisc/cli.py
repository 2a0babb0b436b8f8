"""Command-line interface: ``python -m stratdisc <command> ...``.

Commands
--------
sample        draw a point set and write it in the point-file format
discrepancy   L2 (exact), Lp (Monte Carlo) or star (exact) discrepancy of a point file
expected      replicate a sampler and estimate a moment, with the matching bound
rate          run ``expected`` over several N and fit the log-log slope
bounds        evaluate a closed-form bound

Exit status is 0 on success, 2 on argument errors and 1 when a size guard
refuses the computation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .discrepancy import SizeGuardError, l2_exact, lp_estimate, star_exact_small
from .experiments import (BOUND_ALIASES, BOUNDS, CSV_HEADER, TARGETS, MomentSpec, bound,
                          estimate_moment, fit_rate)
from .partition import PartitionSpec
from .sampling import RngStream, make_sampler, read_points, sample, write_points

STRATEGY_NAMES = ("simple_random", "jittered", "stratified", "rect_grid", "hsfc", "lhs")


def _int_list(text: str) -> list:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _fmt(v) -> str:
    return "%.17g" % v


def _add_sampler_args(p: argparse.ArgumentParser, many_n: bool = False) -> None:
    p.add_argument("--strategy", required=True, choices=STRATEGY_NAMES)
    p.add_argument("--d", type=int, required=True)
    if many_n:
        p.add_argument("--n", type=_int_list, required=True, help="comma-separated sample sizes")
    else:
        p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=_int_list, default=None,
                   help="strata per axis: one value for jittered, d values for rect_grid")
    p.add_argument("--depth", "--base-depth", dest="depth", type=int, default=None,
                   help="Hilbert curve depth for hsfc (default floor(62/d))")
    p.add_argument("--seed", type=_nonneg_int, default=0)


def _add_moment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--target", choices=TARGETS, default="squared_l2")
    p.add_argument("--integrand", choices=("f1", "f2", "f3"), default=None)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--nodes", type=int, default=10_000)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include runtime in the JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stratdisc", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a point set")
    _add_sampler_args(p)
    p.add_argument("--out", default=None, help="output file (default: stdout)")

    p = sub.add_parser("discrepancy", help="discrepancy of a point file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--p", default="2", help="2, any real p >= 1, or 'star'")
    p.add_argument("--nodes", type=int, default=100_000)
    p.add_argument("--seed", type=_nonneg_int, default=0)

    p = sub.add_parser("expected", help="estimate a moment by replication")
    _add_sampler_args(p)
    _add_moment_args(p)
    p.add_argument("--csv", default=None, help="write the CSV row here instead of stdout")

    p = sub.add_parser("rate", help="moment sweep over N with a log-log fit")
    _add_sampler_args(p, many_n=True)
    _add_moment_args(p)

    p = sub.add_parser("bounds", help="evaluate a closed-form bound")
    p.add_argument("--theorem", required=True,
                   choices=sorted(BOUNDS) + sorted(BOUND_ALIASES))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--c", type=float, default=None, help="variance constant for lhs_variance")
    p.add_argument("--c2", type=float, default=None, help="upper diameter constant")
    p.add_argument("--m", type=_int_list, default=None,
                   help="rect_grid strata (gives c2 for the partition bounds)")
    return parser


def _sampler(args, parser, n):
    m = args.m
    if args.strategy in ("jittered", "stratified") and m is not None:
        if len(m) != 1:
            parser.error("--m takes one value for jittered sampling")
        m = m[0]
    try:
        return make_sampler(args.strategy, args.d, n, m=m, depth=args.depth, seed=args.seed)
    except (ValueError, OverflowError) as exc:
        parser.error(str(exc))


def _moment_spec(args, parser, n):
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return MomentSpec(_sampler(args, parser, n), p=args.p, target=args.target,
                          reps=args.reps, seed=args.seed, integrand=args.integrand,
                          nodes=args.nodes)
    except (ValueError, KeyError) as exc:
        parser.error(str(exc))


def _cmd_sample(args, parser, out):
    spec = _sampler(args, parser, args.n)
    x = sample(spec, RngStream(args.seed))
    if args.out:
        write_points(args.out, x)
    else:
        n, d = x.shape
        out.write(f"{d} {n}\n")
        for row in x:
            out.write(" ".join(_fmt(v) for v in row) + "\n")
    return 0


def _cmd_discrepancy(args, parser, out):
    try:
        x = read_points(args.infile)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    if args.p == "star":
        est = star_exact_small(x)
    else:
        try:
            p = float(args.p)
        except ValueError:
            parser.error("--p must be a number >= 1 or 'star'")
        if p < 1 or not math.isfinite(p):
            parser.error("--p must be a number >= 1 or 'star'")
        if p == 2:
            est = l2_exact(x)
        else:
            if args.nodes < 2:
                parser.error("--nodes must be >= 2")
            est = lp_estimate(x, p, args.nodes, RngStream(args.seed))
    out.write(json.dumps(est.to_dict()) + "\n")
    return 0


def _cmd_expected(args, parser, out):
    spec = _moment_spec(args, parser, args.n)
    rep = estimate_moment(spec, workers=args.threads)
    out.write(json.dumps(rep.to_dict(timing=args.timing)) + "\n")
    rows = CSV_HEADER + "\n" + rep.csv_row() + "\n"
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(rows)
    else:
        out.write(rows)
    return 0


def _cmd_rate(args, parser, out):
    specs = [_moment_spec(args, parser, n) for n in args.n]
    if len(specs) < 3:
        parser.error("rate needs at least three values of N")
    reports = [estimate_moment(s, workers=args.threads) for s in specs]
    out.write(CSV_HEADER + "\n")
    for r in reports:
        out.write(r.csv_row() + "\n")
    try:
        fit = fit_rate([(r.N, r.estimate) for r in reports])
    except ValueError as exc:
        out.write(json.dumps({"error": str(exc)}) + "\n")
        return 1
    out.write(json.dumps(fit.to_dict()) + "\n")
    return 0


def _cmd_bounds(args, parser, out):
    part = None
    if args.m is not None:
        try:
            part = PartitionSpec.rect_grid(args.m)
        except ValueError as exc:
            parser.error(str(exc))
    try:
        val = bound(args.theorem, args.d, args.n, p=args.p, partition=part, C=args.c, c2=args.c2)
    except ValueError as exc:
        parser.error(str(exc))
    out.write(_fmt(val) + "\n")
    return 0


COMMANDS = {
    "sample": _cmd_sample,
    "discrepancy": _cmd_discrepancy,
    "expected": _cmd_expected,
    "rate": _cmd_rate,
    "bounds": _cmd_bounds,
}


def run_cli(argv=None, out=None) -> int:
    """Run one command and return its exit status (argument errors give 2)."""
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, parser, out)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except SizeGuardError as exc:
        print(f"stratdisc: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())
