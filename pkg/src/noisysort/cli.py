"""Command line front end: ``noisysort bench | sweep | constants``.

Exit status is 0 on success, 2 on a usage error and 1 when output cannot
be written.
"""
from __future__ import annotations

import argparse
import itertools
import sys

from .bench import ALGORITHMS, BenchConfig, emit, format_constants, report_constants, run_trials
from .sort import DEFAULT_C1, DEFAULT_C2


def _list(kind):
    def parse(text: str):
        try:
            return [kind(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated {kind.__name__} values, got {text!r}")

    return parse


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    sub.add_argument("--trials", type=int, default=1)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--c1", type=float, default=DEFAULT_C1)
    sub.add_argument("--c2", type=float, default=DEFAULT_C2)
    sub.add_argument("--parallel", type=int, default=1)
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", default=None, help="output file (default: stdout)")
    sub.add_argument("--per-trial", action="store_true", help="include per-trial records in JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noisysort", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    bench = subs.add_parser("bench", help="run Monte Carlo trials of one configuration")
    bench.add_argument("--n", type=int, required=True)
    bench.add_argument("--p", type=float, required=True)
    bench.add_argument("--delta", type=float, default=None)
    _common(bench)

    sweep = subs.add_parser("sweep", help="run the cross product of comma-separated n, p, delta lists")
    sweep.add_argument("--n", type=_list(int), required=True)
    sweep.add_argument("--p", type=_list(float), required=True)
    sweep.add_argument("--delta", type=_list(float), default=[None])
    _common(sweep)

    const = subs.add_parser("constants", help="print the constants for a crossover probability")
    const.add_argument("--p", type=float, required=True)
    const.add_argument("--delta", type=float, default=None)
    const.add_argument("--n", type=int, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "constants":
        try:
            rec = report_constants(args.p, args.delta, args.n)
        except ValueError as exc:
            parser.error(str(exc))
        sys.stdout.write(format_constants(rec))
        return 0

    if args.parallel < 1:
        parser.error("--parallel must be at least 1")
    if args.command == "bench":
        grid = [(args.n, args.p, args.delta)]
    else:
        grid = list(itertools.product(args.n, args.p, args.delta))
    try:
        configs = [
            BenchConfig(args.algorithm, n, p, d, args.trials, args.seed, args.c1, args.c2)
            for n, p, d in grid
        ]
    except ValueError as exc:
        parser.error(str(exc))

    aggregates = [run_trials(c, args.parallel) for c in configs]
    try:
        text = emit(aggregates, args.format, args.out, args.per_trial)
    except OSError as exc:
        print(f"noisysort: cannot write output: {exc}", file=sys.stderr)
        return 1
    if args.out is None:
        sys.stdout.write(text)
    return 0
