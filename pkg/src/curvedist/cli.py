"""Command-line entry point: ``curvedist {gen,dist,bench}``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import (
    DESK_FIXED,
    DESK_SIZES,
    FULL_FIXED,
    FULL_SIZES,
    PRECISIONS,
    VARIANTS,
    gen_walks,
    run_experiment,
)
from .batch import DEFAULT_LANE_WIDTH
from .csvio import load_curves_csv, write_bench_csv, write_curves_csv
from .curves import METRICS, coerce_pair, get_metric, row_source
from .frechet import frechet_linear
from .related import dtw_distance

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _name_list(text):
    return [t.strip().replace("-", "_") for t in text.split(",") if t.strip()]


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonnegative(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curvedist", description="Curve distances and throughput benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write random-walk curves to a curve CSV file")
    g.add_argument("--n-points", type=_positive, required=True)
    g.add_argument("--n-curves", type=_positive, default=1)
    g.add_argument("--seed", type=_nonnegative, default=0)
    g.add_argument("--out", required=True)

    d = sub.add_parser("dist", help="distance between the single curves of two CSV files")
    d.add_argument("--p", required=True)
    d.add_argument("--q", required=True)
    d.add_argument("--metric", choices=sorted(METRICS), default="euclidean")
    d.add_argument("--measure", choices=("frechet", "dtw"), default="frechet")
    d.add_argument("--precision", choices=sorted(PRECISIONS), default="f64")

    b = sub.add_parser("bench", help="run a throughput experiment, write a bench CSV")
    b.add_argument("--experiment", choices=("vary-n", "vary-p"), required=True)
    b.add_argument(
        "--variants",
        type=_name_list,
        default=["full_matrix", "linear", "fast", "batch", "baseline"],
        help=f"comma-separated subset of {','.join(VARIANTS)}",
    )
    b.add_argument("--sizes", type=_int_list, default=None,
                   help="comma-separated sweep values (default 2^5..2^10)")
    b.add_argument("--fixed", type=_positive, default=None,
                   help=f"the non-swept dimension (default {DESK_FIXED})")
    b.add_argument("--full-scale", action="store_true",
                   help=f"sweep 2^5..2^14 with fixed size {FULL_FIXED}")
    b.add_argument("--seed", type=_nonnegative, default=0)
    b.add_argument("--reps", type=_positive, default=3)
    b.add_argument("--warmup", type=_nonnegative, default=1)
    b.add_argument("--lane-width", type=_positive, default=DEFAULT_LANE_WIDTH)
    b.add_argument("--workers", type=_positive, default=1)
    b.add_argument("--precision", choices=sorted(PRECISIONS), default="f32")
    b.add_argument("--out", required=True)
    b.add_argument("--quiet", action="store_true")
    return parser


def _single_curve(path, dtype):
    curves = load_curves_csv(path, dtype)
    if len(curves) != 1:
        raise ValueError(f"{path}: expected exactly one curve, found {len(curves)}")
    return curves[0]


def cmd_gen(args):
    write_curves_csv(gen_walks(args.n_curves, args.n_points, args.seed), args.out)


def cmd_dist(args):
    dtype = PRECISIONS[args.precision]
    p, q = coerce_pair(_single_curve(args.p, dtype), _single_curve(args.q, dtype), dtype)
    metric = get_metric(args.metric)
    if args.measure == "frechet":
        value = frechet_linear(p, q, metric)
    else:
        value = dtw_distance(row_source(p, q, metric))
    # shortest text that round-trips in the active precision
    print(repr(float(value)) if dtype == np.float64 else str(np.float32(value)))


def cmd_bench(args):
    unknown = [v for v in args.variants if v not in VARIANTS]
    if unknown:
        raise UsageError(f"unknown variant(s) {','.join(unknown)}; choose from {','.join(VARIANTS)}")
    sizes = args.sizes or (FULL_SIZES if args.full_scale else DESK_SIZES)
    fixed = args.fixed or (FULL_FIXED if args.full_scale else DESK_FIXED)

    def report(rec):
        if not args.quiet:
            print(
                f"{rec.experiment} {rec.variant:<11} n_curves={rec.n_curves:<6} "
                f"curve_len={rec.curve_len:<6} {rec.pairs_per_second:12.1f} pairs/s",
                file=sys.stderr,
            )

    records = run_experiment(
        args.experiment,
        variants=args.variants,
        sizes=sizes,
        seed=args.seed,
        reps=args.reps,
        warmup=args.warmup,
        lane_width=args.lane_width,
        workers=args.workers,
        precision=args.precision,
        fixed=fixed,
        progress=report,
    )
    write_bench_csv(records, args.out)


COMMANDS = {"gen": cmd_gen, "dist": cmd_dist, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"curvedist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"curvedist: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
