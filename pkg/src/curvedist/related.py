"""DTW and Levenshtein distances in the same row-scan formulation.

Swapping the outer ``max`` of the Fréchet step for a sum gives dynamic time
warping; accumulating 0/1 mismatch costs gives the edit distance. DTW is not
a metric (it can violate the triangle inequality), the edit distance is.
"""

from __future__ import annotations

import operator

import numpy as np
from numba import njit

from ._jit import KERNEL_OPTIONS, cast_like, vmin
from .combinators import fold, scan, scan_same
from .frechet import check_workspace

__all__ = [
    "dtw_min",
    "dtw_next",
    "dtw_next_scan",
    "dtw_distance",
    "dtw_oracle",
    "levenshtein_min",
    "levenshtein_next",
    "levenshtein_distance",
    "levenshtein_scan",
    "levenshtein_oracle",
]


# -- dynamic time warping ------------------------------------------------------


def dtw_min(acc, pair):
    return min(acc, pair[0]) + pair[1]


@njit(**KERNEL_OPTIONS)
def _dtw_next(a, x, out):
    prev = a[0]
    acc = cast_like(out, prev + x[0])
    out[0] = acc
    for j in range(1, a.shape[0]):
        cur = a[j]
        acc = cast_like(out, vmin(acc, vmin(prev, cur)) + x[j])
        out[j] = acc
        prev = cur
    return out


def dtw_next(a, x, out=None) -> np.ndarray:
    """Advance a DTW state row by one distance row. ``out`` may alias ``a``."""
    a = np.asarray(a)
    x = np.asarray(x)
    if a.ndim != 1 or a.shape != x.shape or a.shape[0] < 1:
        raise ValueError(f"row length mismatch: {a.shape} vs {x.shape}")
    if out is None:
        out = np.empty_like(a)
    elif out.shape != a.shape:
        raise ValueError(f"output has shape {out.shape}, expected {a.shape}")
    return _dtw_next(a, x, out)


def dtw_next_scan(a, x) -> list:
    a, x = list(a), list(x)
    if len(a) != len(x) or not a:
        raise ValueError(f"row length mismatch: {len(a)} vs {len(x)}")
    b = [min(a[j - 1], a[j]) for j in range(1, len(a))]
    return scan(dtw_min, a[0] + x[0], zip(b, x[1:]))


def dtw_distance(rows, accumulate=None, workspace=None) -> float:
    """DTW distance as a fold over distance-matrix rows, ``O(Q)`` memory.

    Parameters
    ----------
    rows : iterable of 1-D arrays
        Rows of the distance matrix, e.g. a :class:`~curvedist.curves.RowSource`.
    accumulate : numpy dtype, optional
        Precision of the running sums. Defaults to the row dtype; pass
        ``np.float64`` for long ``float32`` curves.
    workspace : ndarray, optional
        State row of exactly ``Q`` slots of the accumulator dtype.
    """
    it = iter(rows)
    try:
        first = np.asarray(next(it))
    except StopIteration:
        raise ValueError("dtw_distance needs at least one row") from None
    if first.ndim != 1 or first.shape[0] < 1:
        raise ValueError("rows must be non-empty 1-D arrays")
    dtype = np.dtype(accumulate) if accumulate is not None else first.dtype
    v = check_workspace(workspace, first.shape[0], dtype)
    v[:] = scan_same(operator.add, first.astype(dtype, copy=False))
    v = fold(lambda acc, row: dtw_next(acc, row.astype(dtype, copy=False), out=acc), v, it)
    return float(v[-1])


@njit(**KERNEL_OPTIONS)
def _dtw_matrix(d, M):
    P, Q = d.shape
    for i in range(P):
        for j in range(Q):
            if i == 0 and j == 0:
                M[i, j] = d[i, j]
            elif i == 0:
                M[i, j] = d[i, j] + M[i, j - 1]
            elif j == 0:
                M[i, j] = d[i, j] + M[i - 1, j]
            else:
                M[i, j] = d[i, j] + min(M[i - 1, j], M[i - 1, j - 1], M[i, j - 1])
    return M[P - 1, Q - 1]


def dtw_oracle(d, accumulate=None) -> float:
    """Textbook full-matrix DTW on a distance matrix."""
    d = np.asarray(d)
    if d.ndim != 2 or d.shape[0] < 1 or d.shape[1] < 1:
        raise ValueError(f"expected a non-empty (P, Q) matrix, got shape {d.shape}")
    if d.dtype.kind != "f":
        d = d.astype(np.float64)
    dtype = np.dtype(accumulate) if accumulate is not None else d.dtype
    d = d.astype(dtype, copy=False)
    return float(_dtw_matrix(d, np.empty(d.shape, dtype=dtype)))


# -- Levenshtein ---------------------------------------------------------------


def levenshtein_min(acc, x):
    return min(acc + 1, x)


def levenshtein_next(a, row):
    """Advance an edit-distance row.

    ``row`` is ``(k, x)`` with ``k`` the number of symbols of ``p`` consumed
    before this row and ``x`` the 0/1 mismatch row.
    """
    k, x = row
    b = [min(a[j - 1] + x[j], a[j] + 1) for j in range(1, len(a))]
    return scan(levenshtein_min, min(k + x[0], a[0] + 1), b)


def levenshtein_scan(p, q) -> int:
    """Edit distance via the scan/fold row formulation (pure Python)."""
    P, Q = len(p), len(q)
    if P == 0 or Q == 0:
        return P + Q
    rows = ([int(a != b) for b in q] for a in p)
    first = next(rows)
    v = scan_same(levenshtein_min, [j + first[j] for j in range(Q)])
    return fold(levenshtein_next, v, zip(range(1, P), rows))[-1]


def _encode(p, q):
    codes = {}
    enc = [np.array([codes.setdefault(s, len(codes)) for s in seq], dtype=np.int64) for seq in (p, q)]
    return enc[0], enc[1]


@njit(**KERNEL_OPTIONS)
def _levenshtein_rows(p, q, v):
    P, Q = p.shape[0], q.shape[0]
    # first row: scan of j + d[0, j]
    acc = 1 if p[0] != q[0] else 0
    v[0] = acc
    for j in range(1, Q):
        acc = min(acc + 1, j + (1 if p[0] != q[j] else 0))
        v[j] = acc
    for i in range(1, P):
        prev = v[0]
        acc = min(i + (1 if p[i] != q[0] else 0), prev + 1)
        v[0] = acc
        for j in range(1, Q):
            cur = v[j]
            b = min(prev + (1 if p[i] != q[j] else 0), cur + 1)
            acc = min(acc + 1, b)
            v[j] = acc
            prev = cur
    return v[Q - 1]


def levenshtein_distance(p, q) -> int:
    """Minimum number of insertions, deletions and substitutions turning ``p``
    into ``q``. Works on any sequences of hashable symbols.

    >>> levenshtein_distance("kitten", "sitting")
    3
    """
    P, Q = len(p), len(q)
    if P == 0 or Q == 0:
        return P + Q
    a, b = _encode(p, q)
    return int(_levenshtein_rows(a, b, np.empty(Q, dtype=np.int64)))


@njit(**KERNEL_OPTIONS)
def _wagner_fischer(p, q, D):
    P, Q = p.shape[0], q.shape[0]
    for i in range(P + 1):
        D[i, 0] = i
    for j in range(Q + 1):
        D[0, j] = j
    for i in range(1, P + 1):
        for j in range(1, Q + 1):
            cost = 0 if p[i - 1] == q[j - 1] else 1
            D[i, j] = min(D[i - 1, j] + 1, D[i, j - 1] + 1, D[i - 1, j - 1] + cost)
    return D[P, Q]


def levenshtein_oracle(p, q) -> int:
    """Full-matrix Wagner-Fischer edit distance."""
    a, b = _encode(p, q)
    D = np.empty((len(a) + 1, len(b) + 1), dtype=np.int64)
    return int(_wagner_fischer(a, b, D))
