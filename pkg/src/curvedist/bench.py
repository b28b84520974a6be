"""Random-walk generator and the two throughput experiments.

Random numbers come from numpy's PCG64 bit generator. A run seed is
expanded with :class:`numpy.random.SeedSequence` into one independent
64-bit child seed per curve, so a curve depends only on the run seed and its
position, never on how many other curves were drawn.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .batch import DEFAULT_LANE_WIDTH, baseline_sum_parallel, frechet_batch_parallel
from .curves import PolygonalCurve, euclidean, row_source
from .frechet import frechet_fast, frechet_full_matrix, frechet_linear

__all__ = [
    "WalkSpec",
    "gen_random_walk",
    "gen_walks",
    "BenchRecord",
    "VARIANTS",
    "DESK_SIZES",
    "FULL_SIZES",
    "run_experiment",
]

DESK_SIZES = tuple(2**k for k in range(5, 11))
FULL_SIZES = tuple(2**k for k in range(5, 15))
DESK_FIXED = 256
FULL_FIXED = 1024

PRECISIONS = {"f32": np.float32, "f64": np.float64}


@dataclass(frozen=True)
class WalkSpec:
    """Parameters of one 2-D lattice random walk."""

    n_points: int
    seed: int
    dimension: int = 2

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")
        if self.dimension != 2:
            raise ValueError("only 2-D walks are supported")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def gen_random_walk(spec: WalkSpec, dtype=np.float64) -> PolygonalCurve:
    """Walk starting at the origin with steps uniform over {-1, 0, 1} per axis.

    >>> gen_random_walk(WalkSpec(1, seed=3)).points.tolist()
    [[0.0, 0.0]]
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    steps = rng.integers(-1, 2, size=(spec.n_points - 1, spec.dimension))
    pts = np.zeros((spec.n_points, spec.dimension), dtype=np.int64)
    np.cumsum(steps, axis=0, out=pts[1:])
    return PolygonalCurve(pts, dtype=dtype)


def gen_walks(n_curves, n_points, seed, dtype=np.float64) -> list:
    """``n_curves`` independent walks; curve ``k`` has id ``str(k)``."""
    if n_curves < 1:
        raise ValueError("n_curves must be >= 1")
    children = np.random.SeedSequence(seed).generate_state(n_curves, np.uint64)
    out = []
    for k, s in enumerate(children):
        c = gen_random_walk(WalkSpec(n_points, int(s)), dtype)
        c.id = str(k)
        out.append(c)
    return out


@dataclass(frozen=True)
class BenchRecord:
    experiment: str
    variant: str
    n_curves: int
    curve_len: int
    lane_width: int
    reps: int
    warmup: int
    total_seconds: float
    pairs_per_second: float
    checksum: float


def _scalar(fn):
    def run(curves, q, ctx):
        return [fn(c, q, ctx) for c in curves]

    return run


def _linear(c, q, ctx):
    return frechet_linear(c, q, workspace=ctx["v"])


def _fast(c, q, ctx):
    return frechet_fast(row_source(c, q), workspace=ctx["v"])


def _batched(fn):
    def run(curves, q, ctx):
        return fn(curves, q, euclidean, workers=ctx["workers"], lane_width=ctx["lane_width"])

    return run


VARIANTS = {
    "full_matrix": _scalar(lambda c, q, ctx: frechet_full_matrix(c, q)),
    "linear": _scalar(_linear),
    "fast": _scalar(_fast),
    "batch": _batched(frechet_batch_parallel),
    # per-lane sum of all distances; its checksum differs from the others
    "baseline": _batched(baseline_sum_parallel),
}

EXPERIMENTS = ("vary_n", "vary_p")


def run_experiment(
    kind,
    variants=("full_matrix", "linear", "fast", "batch"),
    sizes=DESK_SIZES,
    seed=0,
    reps=3,
    warmup=1,
    lane_width=DEFAULT_LANE_WIDTH,
    workers=1,
    precision="f32",
    fixed=DESK_FIXED,
    progress=None,
) -> list:
    """Time every variant on every size; one :class:`BenchRecord` per cell.

    Parameters
    ----------
    kind : {"vary_n", "vary_p"}
        ``vary_n`` sweeps the number of curves at curve length ``fixed``;
        ``vary_p`` sweeps the curve length with ``fixed`` curves.
    variants : sequence of str
        Keys of :data:`VARIANTS`.
    sizes : sequence of int
        Swept values.
    seed : int
        Run seed. Each cell derives its curves from ``(seed, n_curves,
        curve_len)``, so cells are reproducible on their own.
    reps, warmup : int
        Timed and untimed repetitions per cell.
    precision : {"f32", "f64"}
    progress : callable, optional
        Called with each finished record.

    Notes
    -----
    The reference curve ``q`` is one extra walk drawn with the same seed
    stream. ``checksum`` is the exactly rounded sum of all distances of the
    timed repetitions.
    """
    kind = kind.replace("-", "_")
    if kind not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {kind!r}; choose from {EXPERIMENTS}")
    variants = list(variants)
    unknown = [v for v in variants if v not in VARIANTS]
    if unknown:
        raise ValueError(f"unknown variant(s) {unknown}; choose from {sorted(VARIANTS)}")
    sizes = list(sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("sizes must be a non-empty list of positive integers")
    if reps < 1 or warmup < 0:
        raise ValueError("need reps >= 1 and warmup >= 0")
    if precision not in PRECISIONS:
        raise ValueError(f"unknown precision {precision!r}")
    dtype = PRECISIONS[precision]

    records = []
    for size in sizes:
        n_curves, curve_len = (size, fixed) if kind == "vary_n" else (fixed, size)
        cell_seed = [seed, n_curves, curve_len]
        walks = gen_walks(n_curves + 1, curve_len, cell_seed, dtype)
        q, curves = walks[0], walks[1:]
        ctx = {
            "v": np.empty(curve_len, dtype=dtype),
            "workers": workers,
            "lane_width": lane_width,
        }
        for name in variants:
            run = VARIANTS[name]
            for _ in range(warmup):
                run(curves, q, ctx)
            results = []
            t0 = time.perf_counter()
            for _ in range(reps):
                results.append(run(curves, q, ctx))
            total = time.perf_counter() - t0
            checksum = math.fsum(float(d) for r in results for d in r)
            rec = BenchRecord(
                experiment=kind,
                variant=name,
                n_curves=n_curves,
                curve_len=curve_len,
                lane_width=lane_width,
                reps=reps,
                warmup=warmup,
                total_seconds=total,
                pairs_per_second=n_curves * reps / total,
                checksum=checksum,
            )
            records.append(rec)
            if progress is not None:
                progress(rec)
    return records
