import numpy as np
import pytest

from conftest import random_walk
from curvedist.batch import (
    CurveBatch,
    baseline_sum,
    baseline_sum_parallel,
    frechet_batch,
    frechet_batch_parallel,
    pad_batch,
    padding_waste,
    sort_by_length,
)
from curvedist.curves import DimensionMismatchError, PolygonalCurve, distance_matrix
from curvedist.frechet import frechet_linear


def mixed_batch(rng, B, max_len, dtype=np.float64):
    return [random_walk(rng, int(rng.integers(1, max_len + 1)), dtype) for _ in range(B)]


def test_pad_batch_shapes_and_padding():
    curves = [np.full((n, 2), float(n)) for n in (2, 5, 3)]
    curves[0][-1] = [9, 9]
    b = pad_batch(curves)
    assert (b.padded_length, b.lanes, b.dim) == (5, 3, 2)
    assert b.lengths.tolist() == [2, 5, 3]
    assert b.data[:, 0].tolist() == [[2, 2], [9, 9], [9, 9], [9, 9], [9, 9]]
    assert b.curve(0).points.tolist() == [[2, 2], [9, 9]]
    assert len(b.lane(2)) == 5
    with pytest.raises(ValueError):
        b.data[0, 0, 0] = 1.0


def test_pad_batch_single_curve_has_no_padding():
    b = pad_batch([np.zeros((3, 2))])
    assert b.padded_length == 3 and padding_waste(b.lengths, 1) == 0


def test_pad_batch_errors():
    with pytest.raises(ValueError):
        pad_batch([])
    with pytest.raises(DimensionMismatchError):
        pad_batch([np.zeros((2, 2)), np.zeros((2, 3))])
    with pytest.raises(ValueError):
        pad_batch([np.zeros((2, 2))] * 2, permutation=[0, 0])


def test_sort_by_length():
    curves = [np.zeros((n, 1)) for n in (5, 2, 3)]
    ordered, perm = sort_by_length(curves)
    assert [len(c) for c in ordered] == [2, 3, 5]
    restored = [None] * 3
    for k, c in zip(perm, ordered):
        restored[k] = c
    assert [len(c) for c in restored] == [5, 2, 3]
    _, ident = sort_by_length([np.zeros((n, 1)) for n in (1, 2, 2, 4)])
    assert ident.tolist() == [0, 1, 2, 3]


def test_padding_waste():
    assert padding_waste([2, 5, 3], 3) == 5
    assert padding_waste([4, 4, 4, 4], 3) == 0
    lengths = np.random.default_rng(1).integers(1, 100, 64)
    assert padding_waste(np.sort(lengths), 8) <= padding_waste(lengths, 8)


def test_batch_of_one_is_linear(rng):
    p, q = random_walk(rng, 30), random_walk(rng, 20)
    assert frechet_batch([p], q)[0] == frechet_linear(p, q)


def test_identical_copies(rng):
    p, q = random_walk(rng, 17), random_walk(rng, 12)
    out = frechet_batch([p] * 10, q, lane_width=4)
    assert len(set(out.tolist())) == 1


@pytest.mark.parametrize("dtype", [np.float32, np.float64])
@pytest.mark.parametrize("metric", ["euclidean", "sq-euclidean"])
def test_batch_matches_scalar(rng, dtype, metric):
    curves = mixed_batch(rng, 64, 40, dtype)
    q = random_walk(rng, int(rng.integers(1, 41)), dtype)
    expected = [frechet_linear(c, q, metric) for c in curves]
    for L in (1, 3, 8, 32, 100):
        assert frechet_batch(curves, q, metric, lane_width=L).tolist() == expected


def test_batch_haversine(rng):
    def track(n):
        lat = np.clip(10 + np.cumsum(rng.normal(0, 0.1, n)), -90, 90)
        lon = np.clip(20 + np.cumsum(rng.normal(0, 0.1, n)), -180, 180)
        return PolygonalCurve(np.column_stack([lat, lon]))

    curves = [track(int(n)) for n in rng.integers(1, 30, 20)]
    q = track(15)
    expected = [frechet_linear(c, q, "haversine") for c in curves]
    assert frechet_batch(curves, q, "haversine", lane_width=8).tolist() == expected


def test_batch_permutation_restores_input_order(rng):
    curves = mixed_batch(rng, 12, 20)
    q = random_walk(rng, 10)
    ordered, perm = sort_by_length(curves)
    b = pad_batch(ordered, permutation=perm)
    assert frechet_batch(b, q).tolist() == [frechet_linear(c, q) for c in curves]


def test_batch_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatchError):
        frechet_batch([np.zeros((3, 2))], np.zeros((3, 3)))
    with pytest.raises(ValueError):
        frechet_batch([np.zeros((3, 2))], np.zeros((3, 2)), lane_width=0)


def test_batch_workspace_is_exact(rng):
    curves = mixed_batch(rng, 5, 10)
    q = random_walk(rng, 7)
    ws = np.empty(5 * 7)
    assert frechet_batch(curves, q, workspace=ws).tolist() == [frechet_linear(c, q) for c in curves]
    for n in (5 * 7 - 1, 5 * 7 + 1):
        with pytest.raises(ValueError, match="exactly 35"):
            frechet_batch(curves, q, workspace=np.empty(n))


@pytest.mark.parametrize("sort", [False, True])
def test_parallel_is_independent_of_workers(rng, sort):
    curves = mixed_batch(rng, 150, 60, np.float32)
    q = random_walk(rng, 33, np.float32)
    one = frechet_batch_parallel(curves, q, workers=1, lane_width=8, chunk_size=16, sort=sort)
    four = frechet_batch_parallel(curves, q, workers=4, lane_width=8, chunk_size=16, sort=sort)
    assert np.array_equal(one, four)
    assert one.tolist() == [frechet_linear(c, q) for c in curves]


def test_parallel_workers_one_equals_batch_concatenation(rng):
    curves = mixed_batch(rng, 40, 30)
    q = random_walk(rng, 9)
    chunks = [frechet_batch(curves[s : s + 16], q, lane_width=4) for s in range(0, 40, 16)]
    out = frechet_batch_parallel(curves, q, lane_width=4, chunk_size=16)
    assert np.array_equal(out, np.concatenate(chunks))


def test_parallel_errors_and_empty():
    assert frechet_batch_parallel([], np.zeros((2, 2))).shape == (0,)
    with pytest.raises(ValueError):
        frechet_batch_parallel([np.zeros((2, 2))], np.zeros((2, 2)), workers=0)


def test_baseline_examples():
    assert baseline_sum([[[0, 0]]], [[0, 0]]).tolist() == [0.0]
    assert baseline_sum([[[0, 0]]], [[0, 0], [3, 4]]).tolist() == [5.0]


def test_baseline_sums_padded_matrix(rng):
    curves = mixed_batch(rng, 20, 30, np.float32)
    q = random_walk(rng, 25, np.float32)
    b = pad_batch(curves)
    out = baseline_sum(b, q, lane_width=8)
    for k in range(b.lanes):
        naive = distance_matrix(b.lane(k), q).astype(np.float64).sum()
        assert out[k] == pytest.approx(naive, rel=1e-5)
    # one chunk pads exactly like ``b``; smaller chunks pad less
    assert np.array_equal(baseline_sum_parallel(curves, q, lane_width=8, chunk_size=20), out)
    small = baseline_sum_parallel(curves, q, lane_width=8, workers=3, chunk_size=7)
    assert (small <= out).all()
