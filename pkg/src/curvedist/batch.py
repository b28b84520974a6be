"""Batched Fréchet evaluation of many curves against one reference curve.

Curves are padded to a common length by repeating their last point, which
does not change their Fréchet distance, and stored lane-major as a
``(P̃, B, D)`` tensor. The kernel advances ``lane_width`` lanes in lockstep:
the scan over ``j`` stays sequential inside each lane, and the innermost loop
runs across lanes, where the compiler can use vector registers.

State layout: lanes are processed in groups of ``lane_width``. The state of a
group of ``n`` lanes is a contiguous ``(Q, n)`` block of the flat ``B * Q``
workspace, so for fixed ``j`` the ``n`` lane values are adjacent in memory.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from ._jit import KERNEL_OPTIONS, cast_like, vmax, vmin
from .curves import DimensionMismatchError, PolygonalCurve, as_curve, euclidean, get_metric
from .frechet import check_workspace

__all__ = [
    "DEFAULT_LANE_WIDTH",
    "CurveBatch",
    "pad_batch",
    "sort_by_length",
    "padding_waste",
    "frechet_batch",
    "frechet_batch_parallel",
    "baseline_sum",
    "baseline_sum_parallel",
]

DEFAULT_LANE_WIDTH = 32
CHUNK_LANES = 8


@dataclass(frozen=True)
class CurveBatch:
    """``B`` curves padded to a common length, stored lane-major.

    Attributes
    ----------
    data : ndarray, shape (P̃, B, D)
        Padded coordinates; lane ``k`` holds input curve ``permutation[k]``.
    lengths : ndarray, shape (B,)
        Original (unpadded) length of each lane.
    permutation : ndarray, shape (B,)
        Maps lane index to the caller's input position.
    """

    data: np.ndarray
    lengths: np.ndarray
    permutation: np.ndarray

    @property
    def lanes(self) -> int:
        return self.data.shape[1]

    @property
    def padded_length(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[2]

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def lane(self, k) -> PolygonalCurve:
        """The padded curve of lane ``k``."""
        return PolygonalCurve(self.data[:, k, :])

    def curve(self, k) -> PolygonalCurve:
        """The original, unpadded curve of lane ``k``."""
        return PolygonalCurve(self.data[: self.lengths[k], k, :])


def pad_batch(curves, permutation=None, dtype=None) -> CurveBatch:
    """Stack curves into a :class:`CurveBatch`, padding with the last point.

    Examples
    --------
    >>> b = pad_batch([[[0, 0], [1, 1]], [[5, 5]]])
    >>> b.data[:, 1].tolist()
    [[5.0, 5.0], [5.0, 5.0]]
    """
    curves = [as_curve(c) for c in curves]
    if not curves:
        raise ValueError("cannot build a batch from zero curves")
    dims = {c.dim for c in curves}
    if len(dims) != 1:
        raise DimensionMismatchError(f"curves have mixed dimensions {sorted(dims)}")
    if dtype is None:
        dtype = np.result_type(*[c.dtype for c in curves])
    B, D = len(curves), dims.pop()
    lengths = np.array([len(c) for c in curves], dtype=np.int64)
    Pt = int(lengths.max())
    data = np.empty((Pt, B, D), dtype=dtype)
    for k, c in enumerate(curves):
        n = len(c)
        data[:n, k, :] = c.points
        data[n:, k, :] = c.points[-1]
    if permutation is None:
        permutation = np.arange(B)
    else:
        permutation = np.asarray(permutation, dtype=np.int64)
        if permutation.shape != (B,) or not np.array_equal(np.sort(permutation), np.arange(B)):
            raise ValueError("permutation must be a bijection on range(B)")
    data.flags.writeable = False
    return CurveBatch(data, lengths, permutation)


def sort_by_length(curves):
    """Stable sort by length.

    Returns ``(sorted_curves, permutation)`` with
    ``sorted_curves[k] is curves[permutation[k]]``.
    """
    curves = list(curves)
    order = sorted(range(len(curves)), key=lambda k: len(curves[k]))
    return [curves[k] for k in order], np.array(order, dtype=np.int64)


def padding_waste(lengths, chunk_size) -> int:
    """Number of padding points when ``lengths`` are cut into consecutive chunks."""
    lengths = np.asarray(lengths)
    waste = 0
    for s in range(0, len(lengths), chunk_size):
        chunk = lengths[s : s + chunk_size]
        waste += int(chunk.max() * len(chunk) - chunk.sum())
    return waste


# -- kernels -------------------------------------------------------------------


@njit(**KERNEL_OPTIONS)
def _load_lanes(data, i, g, n, scratch):
    # (D, n) C-order block viewed as an (n, D) F-order array: lane k's
    # coordinate c sits at scratch[c * n + k], contiguous across lanes
    D = data.shape[2]
    block = scratch[: D * n].reshape((D, n))
    for k in range(n):
        for c in range(D):
            block[c, k] = data[i, g + k, c]
    return block.T


@njit(**KERNEL_OPTIONS)
def _frechet_group(data, g, n, q, f, st, scratch):
    Pt = data.shape[0]
    Q = q.shape[0]
    lanes = _load_lanes(data, 0, g, n, scratch)
    row = st[0:n]
    for k in range(n):
        row[k] = cast_like(st, f(lanes, k, q, 0))
    for j in range(1, Q):
        prev = row
        row = st[j * n : (j + 1) * n]
        for k in range(n):
            row[k] = cast_like(st, vmax(prev[k], f(lanes, k, q, j)))
    for i in range(1, Pt):
        lanes = _load_lanes(data, i, g, n, scratch)
        # element-wise min with the left neighbour, right to left so every
        # read sees the previous row
        for j in range(Q - 1, 0, -1):
            prev = st[(j - 1) * n : j * n]
            row = st[j * n : (j + 1) * n]
            for k in range(n):
                row[k] = vmin(prev[k], row[k])
        row = st[0:n]
        for k in range(n):
            row[k] = cast_like(st, vmax(row[k], f(lanes, k, q, 0)))
        for j in range(1, Q):
            prev = row
            row = st[j * n : (j + 1) * n]
            for k in range(n):
                row[k] = cast_like(st, vmax(vmin(prev[k], row[k]), f(lanes, k, q, j)))


@njit(**KERNEL_OPTIONS)
def _sum_group(data, g, n, q, f, st, scratch):
    Pt = data.shape[0]
    Q = q.shape[0]
    acc = st[0:n]
    for k in range(n):
        acc[k] = 0
    for i in range(Pt):
        lanes = _load_lanes(data, i, g, n, scratch)
        for j in range(Q):
            for k in range(n):
                acc[k] = cast_like(st, acc[k] + f(lanes, k, q, j))


@njit(**KERNEL_OPTIONS)
def _run_frechet(data, q, f, L, state, scratch, out):
    B = data.shape[1]
    Q = q.shape[0]
    for g in range(0, B, L):
        n = min(L, B - g)
        st = state[g * Q : (g + n) * Q]
        _frechet_group(data, g, n, q, f, st, scratch)
        for k in range(n):
            out[g + k] = st[(Q - 1) * n + k]


@njit(**KERNEL_OPTIONS)
def _run_sum(data, q, f, L, state, scratch, out):
    B = data.shape[1]
    Q = q.shape[0]
    for g in range(0, B, L):
        n = min(L, B - g)
        st = state[g * Q : (g + n) * Q]
        _sum_group(data, g, n, q, f, st, scratch)
        for k in range(n):
            out[g + k] = st[k]


def _prepare_batch(batch, q, metric, lane_width):
    if not isinstance(batch, CurveBatch):
        batch = pad_batch(batch)
    if lane_width < 1:
        raise ValueError("lane_width must be >= 1")
    metric = get_metric(metric)
    q = as_curve(q, batch.dtype)
    if q.dim != batch.dim:
        raise DimensionMismatchError(f"dimension mismatch: {batch.dim} vs {q.dim}")
    metric.check(q.points)
    metric.check(batch.data.reshape(-1, batch.dim))
    return batch, q, metric


def _run(runner, batch, q, metric, lane_width, workspace):
    batch, q, metric = _prepare_batch(batch, q, metric, lane_width)
    B, Q = batch.lanes, len(q)
    L = min(lane_width, B)
    state = check_workspace(workspace, B * Q, batch.dtype)
    scratch = np.empty(batch.dim * L, dtype=batch.dtype)
    lane_out = np.empty(B, dtype=batch.dtype)
    runner(batch.data, q.points, metric.kernel_for(batch.dim), L, state, scratch, lane_out)
    out = np.empty(B, dtype=np.float64)
    out[batch.permutation] = lane_out
    return out


def frechet_batch(batch, q, metric=euclidean, lane_width=DEFAULT_LANE_WIDTH, workspace=None):
    """Fréchet distance of every lane of ``batch`` to the curve ``q``.

    Parameters
    ----------
    batch : CurveBatch or sequence of curves
        Padded with :func:`pad_batch` if not already a batch.
    q : curve
    metric : Metric or str
    lane_width : int
        Lanes advanced together in the innermost loop.
    workspace : ndarray, optional
        Flat state buffer of exactly ``B * len(q)`` slots of the batch dtype.

    Returns
    -------
    ndarray, shape (B,)
        Distances in input order (lane ``k`` goes to ``permutation[k]``),
        bit-identical to :func:`~curvedist.frechet.frechet_linear` per curve.
    """
    return _run(_run_frechet, batch, q, metric, lane_width, workspace)


def baseline_sum(batch, q, metric=euclidean, lane_width=DEFAULT_LANE_WIDTH, workspace=None):
    """Per-lane sum of all ``P̃ * Q`` distances, with the loop structure and
    layout of :func:`frechet_batch`. A throughput ceiling for the batch kernel."""
    return _run(_run_sum, batch, q, metric, lane_width, workspace)


def _chunked(fn, curves, q, metric, workers, lane_width, chunk_size, sort):
    curves = [as_curve(c) for c in curves]
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if not curves:
        return np.empty(0, dtype=np.float64)
    if chunk_size is None:
        chunk_size = lane_width * CHUNK_LANES
    if sort:
        ordered, order = sort_by_length(curves)
    else:
        ordered, order = curves, np.arange(len(curves))
    chunks = [
        (ordered[s : s + chunk_size], order[s : s + chunk_size])
        for s in range(0, len(ordered), chunk_size)
    ]

    def work(chunk):
        members, _ = chunk
        return fn(pad_batch(members), q, metric, lane_width)

    out = np.empty(len(curves), dtype=np.float64)
    if workers == 1:
        results = map(work, chunks)
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        results = pool.map(work, chunks)
    try:
        for (_, idx), values in zip(chunks, results):
            out[idx] = values
    finally:
        if workers > 1:
            pool.shutdown()
    return out


def frechet_batch_parallel(
    curves,
    q,
    metric=euclidean,
    workers=1,
    lane_width=DEFAULT_LANE_WIDTH,
    chunk_size=None,
    sort=False,
):
    """Fréchet distances of many curves to ``q``, chunked across threads.

    Curves are cut into chunks of ``chunk_size`` (default
    ``lane_width * 8``), each padded and run through :func:`frechet_batch`
    on a thread pool; the compiled kernels release the GIL. With
    ``sort=True`` curves are ordered by length first to reduce padding.
    Results come back in input order and do not depend on ``workers``.
    """
    return _chunked(frechet_batch, curves, q, metric, workers, lane_width, chunk_size, sort)


def baseline_sum_parallel(
    curves,
    q,
    metric=euclidean,
    workers=1,
    lane_width=DEFAULT_LANE_WIDTH,
    chunk_size=None,
    sort=False,
):
    return _chunked(baseline_sum, curves, q, metric, workers, lane_width, chunk_size, sort)
