"""Acceptance checks, one test (or a few parts) per numbered criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints
one PASS/FAIL line per criterion. Timing checks use the minimum over
repeats and fixed seeds.
"""

import csv
import gc
import math
import string
import subprocess
import sys
import time
import tracemalloc

import numpy as np
import pytest

from conftest import random_walk
from curvedist.batch import (
    baseline_sum,
    frechet_batch,
    frechet_batch_parallel,
    pad_batch,
)
from curvedist.bench import gen_walks, run_experiment
from curvedist.curves import distance_matrix, row_source
from curvedist.frechet import (
    frechet_bruteforce,
    frechet_fast,
    frechet_full_matrix,
    frechet_inplace,
    frechet_linear,
    frechet_recursive,
    hausdorff_discrete,
)
from curvedist.related import dtw_distance, dtw_oracle, levenshtein_distance, levenshtein_oracle

criterion = pytest.mark.criterion

# tolerances and sizes pinned here
TRIANGLE_RTOL = 1e-9
DTW_GUARD_RTOL = 1e-6
NOISE = 1.10  # linear may be at most 10% slower than full matrix (min of repeats)
MEMORY_SPEEDUP_P = 2**11
MEMORY_SPEEDUP = 1.5
SIMD_SPEEDUP = 2.0
SIMD_LANES = 32
DESK_N = DESK_P = 2**8
SWEEP_BUDGET_S = 300.0


def five_kernels(p, q):
    return (
        frechet_recursive(p, q),
        frechet_full_matrix(p, q),
        frechet_inplace(distance_matrix(p, q)),
        frechet_fast(row_source(p, q)),
        frechet_linear(p, q),
    )


@criterion("1", "five kernels equal brute force on 1000 pairs with P+Q <= 14, < 30 s")
def test_c01_oracle_equivalence():
    rng = np.random.default_rng(1)
    five_kernels(random_walk(rng, 2), random_walk(rng, 2))  # compile outside the clock
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(1000):
        P = int(rng.integers(1, 13))
        Q = int(rng.integers(1, 14 - P + 1))
        p, q = random_walk(rng, P), random_walk(rng, Q)
        expected = frechet_bruteforce(p, q)
        mismatches += any(r != expected for r in five_kernels(p, q))
    elapsed = time.perf_counter() - t0
    print(f"criterion 1: mismatches={mismatches} elapsed={elapsed:.2f}s")
    assert mismatches == 0
    assert elapsed < 30


@criterion("2", "four kernels bit-exact on 200 pairs with P, Q <= 512, < 60 s")
def test_c02_variant_agreement():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    mismatches = 0
    for k in range(200):
        dtype = np.float32 if k % 2 else np.float64
        p = random_walk(rng, int(rng.integers(1, 513)), dtype)
        q = random_walk(rng, int(rng.integers(1, 513)), dtype)
        results = {
            frechet_full_matrix(p, q),
            frechet_inplace(distance_matrix(p, q)),
            frechet_linear(p, q),
            frechet_fast(row_source(p, q)),
        }
        mismatches += len(results) != 1
    elapsed = time.perf_counter() - t0
    print(f"criterion 2: mismatches={mismatches} elapsed={elapsed:.2f}s")
    assert mismatches == 0
    assert elapsed < 60


@criterion("3", "every distance is an entry of its distance matrix")
def test_c03_selection_property():
    rng = np.random.default_rng(3)
    misses = 0
    trials = 0
    for k in range(300):
        dtype = np.float32 if k % 2 else np.float64
        metric = ("euclidean", "sq-euclidean")[k % 3 == 0]
        p = random_walk(rng, int(rng.integers(1, 60)), dtype)
        q = random_walk(rng, int(rng.integers(1, 60)), dtype)
        entries = set(distance_matrix(p, q, metric).ravel().tolist())
        values = [
            frechet_full_matrix(p, q, metric),
            frechet_linear(p, q, metric),
            frechet_fast(row_source(p, q, metric)),
            frechet_inplace(distance_matrix(p, q, metric)),
            frechet_batch([p], q, metric)[0],
        ]
        if len(p) + len(q) <= 200:
            values.append(frechet_recursive(p, q, metric))
        trials += len(values)
        misses += sum(v not in entries for v in values)
    print(f"criterion 3: {trials - misses}/{trials} results are matrix entries")
    assert misses == 0


@criterion("4", "symmetry, triangle inequality (rtol 1e-9), Hausdorff dominance on 1000 triples")
def test_c04_metric_axioms():
    rng = np.random.default_rng(4)
    bad = {"symmetry": 0, "triangle": 0, "hausdorff": 0}
    for _ in range(1000):
        a, b, c = (random_walk(rng, int(rng.integers(1, 40))) for _ in range(3))
        ab, ba = frechet_linear(a, b), frechet_linear(b, a)
        bc, ac = frechet_linear(b, c), frechet_linear(a, c)
        bad["symmetry"] += ab != ba
        bad["triangle"] += ac > (ab + bc) * (1 + TRIANGLE_RTOL)
        bad["hausdorff"] += ab < hausdorff_discrete(a, b)
    print(f"criterion 4: violations {bad}")
    assert bad == {"symmetry": 0, "triangle": 0, "hausdorff": 0}


@criterion("5", "repeating points leaves the distance unchanged on 500 curves")
def test_c05_repeat_point_invariance():
    rng = np.random.default_rng(5)
    changed = 0
    for _ in range(500):
        p = random_walk(rng, int(rng.integers(1, 50)))
        q = random_walk(rng, int(rng.integers(1, 50)))
        base = frechet_linear(p, q)
        p2 = p.repeat_points(rng.integers(1, 4, len(p)))
        q2 = q.repeat_points(rng.integers(1, 4, len(q)))
        changed += frechet_linear(p2, q) != base
        changed += frechet_linear(p2, q2) != base
        changed += frechet_fast(row_source(p, q2)) != base
    print(f"criterion 5: changed={changed}")
    assert changed == 0


@criterion("6", "batch equals scalar bit-exactly for B <= 256, all lane widths and worker counts")
def test_c06_batch_correctness():
    rng = np.random.default_rng(6)
    failures = []
    for B, max_len, dtype in [(1, 30, np.float64), (37, 80, np.float32), (256, 120, np.float32),
                              (256, 64, np.float64), (100, 1, np.float64)]:
        curves = [random_walk(rng, int(rng.integers(1, max_len + 1)), dtype) for _ in range(B)]
        q = random_walk(rng, int(rng.integers(1, 100)), dtype)
        expected = np.array([frechet_linear(c, q) for c in curves])
        batch = pad_batch(curves)
        padded = np.array([frechet_linear(batch.lane(k), q) for k in range(B)])
        if not np.array_equal(padded, expected):
            failures.append((B, "padded lanes"))
        for L in (1, 4, 16, 32):
            if not np.array_equal(frechet_batch(batch, q, lane_width=L), expected):
                failures.append((B, "lane_width", L))
            for workers in (1, 4):
                for sort in (False, True):
                    got = frechet_batch_parallel(curves, q, workers=workers, lane_width=L, sort=sort,
                                                 chunk_size=max(L, 24))
                    if not np.array_equal(got, expected):
                        failures.append((B, "workers", workers, L, sort))
    print(f"criterion 6: failures={failures}")
    assert not failures


@criterion("7", "DTW equals the full-matrix oracle on 1000 pairs; frozen triangle counterexample")
def test_c07_dtw():
    rng = np.random.default_rng(7)
    worst = 0.0
    inexact = 0
    for _ in range(1000):
        p = random_walk(rng, int(rng.integers(1, 100)))
        q = random_walk(rng, int(rng.integers(1, 100)))
        got = dtw_distance(row_source(p, q))
        want = dtw_oracle(distance_matrix(p, q))
        inexact += got != want
        if want:
            worst = max(worst, abs(got - want) / want)
    a, b, c = [3.0, 3.0], [1.0], [0.0]
    dtw = lambda x, y: dtw_distance(row_source(x, y))
    violated = dtw(a, c) > dtw(a, b) + dtw(b, c)
    print(f"criterion 7: inexact={inexact} worst_rel={worst:.3g} counterexample_holds={violated}")
    assert worst <= DTW_GUARD_RTOL
    assert violated


@criterion("8", "Levenshtein equals Wagner-Fischer on 10000 pairs; fixed examples")
def test_c08_levenshtein():
    rng = np.random.default_rng(8)
    wrong = 0
    for k in range(10_000):
        alphabet = "ab" if k % 2 else string.ascii_lowercase
        p = "".join(rng.choice(list(alphabet), int(rng.integers(0, 65))))
        q = "".join(rng.choice(list(alphabet), int(rng.integers(0, 65))))
        wrong += levenshtein_distance(p, q) != levenshtein_oracle(p, q)
    print(f"criterion 8: wrong={wrong}")
    assert wrong == 0
    assert levenshtein_distance("kitten", "sitting") == 3
    assert levenshtein_distance("", "abcd") == 4
    assert levenshtein_distance("abc", "") == 3
    assert levenshtein_distance("", "") == 0


def _peak_bytes(fn):
    gc.collect()
    tracemalloc.start()
    try:
        fn()
        return tracemalloc.get_traced_memory()[1]
    finally:
        tracemalloc.stop()


@criterion("9", "exact Q / B*Q workspaces and no P*Q allocation in the linear-memory kernels")
def test_c09_memory_contract():
    rng = np.random.default_rng(9)
    P = Q = 2000
    B = 8
    p, q = random_walk(rng, P), random_walk(rng, Q)
    curves = [random_walk(rng, P) for _ in range(B)]
    batch = pad_batch(curves)
    pq_bytes = P * Q * 8

    v = np.empty(Q)
    ws = np.empty(B * Q)
    # warm up compilation before measuring
    frechet_linear(p, q, workspace=v)
    frechet_fast(row_source(p, q), workspace=v)
    frechet_batch(batch, q, workspace=ws)

    peaks = {
        "linear": _peak_bytes(lambda: frechet_linear(p, q, workspace=v)),
        "fast": _peak_bytes(lambda: frechet_fast(row_source(p, q), workspace=v)),
        "batch": _peak_bytes(lambda: frechet_batch(batch, q, workspace=ws)),
        "full_matrix": _peak_bytes(lambda: frechet_full_matrix(p, q)),
    }
    print(f"criterion 9: peak traced bytes {peaks}, P*Q*8={pq_bytes}")
    # sanity: the tracer sees the full-matrix kernel's table
    assert peaks["full_matrix"] >= pq_bytes
    for name in ("linear", "fast", "batch"):
        assert peaks[name] < pq_bytes // 20, name

    for bad in (Q - 1, Q + 1):
        with pytest.raises(ValueError):
            frechet_linear(p, q, workspace=np.empty(bad))
        with pytest.raises(ValueError):
            frechet_fast(row_source(p, q), workspace=np.empty(bad))
    for bad in (B * Q - 1, B * Q + 1):
        with pytest.raises(ValueError):
            frechet_batch(batch, q, workspace=np.empty(bad))


def _best_time(fn, repeats):
    fn()
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


@pytest.fixture(scope="module")
def desk_data():
    walks = gen_walks(DESK_N + 1, DESK_P, seed=10, dtype=np.float32)
    return walks[1:], walks[0]


@criterion("10", "(a) linear not slower than full matrix at desk scale (noise factor 1.10)")
def test_c10a_linear_not_slower(desk_data):
    curves, q = desk_data
    v = np.empty(len(q), np.float32)
    t_full = _best_time(lambda: [frechet_full_matrix(c, q) for c in curves], 7)
    t_lin = _best_time(lambda: [frechet_linear(c, q, workspace=v) for c in curves], 7)
    print(f"criterion 10a: full={t_full:.4f}s linear={t_lin:.4f}s ratio={t_full / t_lin:.2f}")
    assert t_lin <= NOISE * t_full


@criterion("10", "(a) linear at least 1.5x faster than full matrix at P = 2^11")
def test_c10a_linear_faster_at_large_p():
    walks = gen_walks(9, MEMORY_SPEEDUP_P, seed=11, dtype=np.float32)
    curves, q = walks[1:], walks[0]
    v = np.empty(len(q), np.float32)
    t_full = _best_time(lambda: [frechet_full_matrix(c, q) for c in curves], 3)
    t_lin = _best_time(lambda: [frechet_linear(c, q, workspace=v) for c in curves], 3)
    print(f"criterion 10a: P=2^11 full={t_full:.3f}s linear={t_lin:.3f}s speedup={t_full / t_lin:.2f}")
    assert t_full / t_lin >= MEMORY_SPEEDUP


@criterion("10", "(b) batch (lane width 32) at least 2x the pairs/s of scalar linear")
def test_c10b_batch_speedup(desk_data):
    curves, q = desk_data
    v = np.empty(len(q), np.float32)
    t_lin = _best_time(lambda: [frechet_linear(c, q, workspace=v) for c in curves], 7)
    t_batch = _best_time(lambda: frechet_batch_parallel(curves, q, lane_width=SIMD_LANES), 7)
    print(f"criterion 10b: linear={t_lin:.4f}s batch={t_batch:.4f}s speedup={t_lin / t_batch:.2f}")
    assert t_lin / t_batch >= SIMD_SPEEDUP


@criterion("10", "(c) baseline_sum throughput >= frechet_batch throughput")
def test_c10c_baseline_dominates(desk_data):
    curves, q = desk_data
    batch = pad_batch(curves)
    t_batch = _best_time(lambda: frechet_batch(batch, q, lane_width=SIMD_LANES), 7)
    t_base = _best_time(lambda: baseline_sum(batch, q, lane_width=SIMD_LANES), 7)
    print(f"criterion 10c: batch={t_batch:.4f}s baseline={t_base:.4f}s")
    assert t_base <= t_batch


@criterion("10", "default bench sweeps each finish in under 5 minutes")
@pytest.mark.parametrize("kind", ["vary_n", "vary_p"])
def test_c10_default_sweep_budget(kind):
    t0 = time.perf_counter()
    records = run_experiment(kind, ["full_matrix", "linear", "fast", "batch", "baseline"])
    elapsed = time.perf_counter() - t0
    print(f"criterion 10: default {kind} sweep {len(records)} records in {elapsed:.1f}s")
    assert elapsed < SWEEP_BUDGET_S


def _bench_checksums(path):
    argv = [sys.executable, "-m", "curvedist", "bench", "--experiment", "vary-n",
            "--sizes", "32,64,128", "--seed", "2024", "--reps", "2", "--warmup", "1",
            "--quiet", "--out", str(path)]
    subprocess.run(argv, check=True)
    with open(path, newline="") as fh:
        return [row["checksum"] for row in csv.DictReader(fh)]


@criterion("11", "two bench runs with the same seed give identical checksum columns")
def test_c11_reproducibility(tmp_path):
    first = _bench_checksums(tmp_path / "a.csv")
    second = _bench_checksums(tmp_path / "b.csv")
    print(f"criterion 11: {len(first)} rows, identical={first == second}")
    assert first and first == second
