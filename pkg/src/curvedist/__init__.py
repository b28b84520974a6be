"""Discrete Fréchet distance in several equivalent formulations, with DTW and
edit-distance siblings, lane-batched evaluation and a benchmark CLI."""

from .batch import (
    CurveBatch,
    baseline_sum,
    baseline_sum_parallel,
    frechet_batch,
    frechet_batch_parallel,
    pad_batch,
    sort_by_length,
)
from .bench import BenchRecord, WalkSpec, gen_random_walk, gen_walks, run_experiment
from .combinators import fold, fold_same, scan, scan_into, scan_same
from .csvio import CurveFileError, load_curves_csv, write_bench_csv, write_curves_csv
from .curves import (
    METRICS,
    DimensionMismatchError,
    Metric,
    PolygonalCurve,
    distance_matrix,
    euclidean,
    get_metric,
    haversine,
    make_metric,
    row_source,
    sq_euclidean,
)
from .frechet import (
    frechet_bruteforce,
    frechet_fast,
    frechet_full_matrix,
    frechet_inplace,
    frechet_linear,
    frechet_next,
    frechet_recursive,
    hausdorff_discrete,
)
from .related import dtw_distance, dtw_oracle, levenshtein_distance, levenshtein_oracle

__version__ = "0.1.0"
