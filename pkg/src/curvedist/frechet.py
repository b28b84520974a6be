"""Discrete Fréchet distance kernels.

Every kernel solves the same recurrence over the distance matrix ``d``::

    M[i, j] = max(min(M[i-1, j], M[i-1, j-1], M[i, j-1]), d[i, j])

and returns ``M[P-1, Q-1]``. Because only max/min selections are applied to
metric outputs, all variants return bit-identical results for identical
inputs, and the result is always one of the ``d[i, j]``.

==========================  =======================================  ========
kernel                      formulation                              memory
==========================  =======================================  ========
``frechet_recursive``       memoised top-down recursion (reference)  P*Q
``frechet_full_matrix``     bottom-up loops with explicit branches   P*Q
``frechet_inplace``         branch-free, overwrites ``d``            none
``frechet_linear``          fused loops over one state row           Q
``frechet_fast``            fold of ``frechet_next`` over lazy rows  Q
==========================  =======================================  ========

``frechet_bruteforce`` and ``hausdorff_discrete`` are verification oracles.
"""

from __future__ import annotations

import math
import sys
import threading

import numpy as np
from numba import njit

from ._jit import KERNEL_OPTIONS, cast_like, vmax, vmin
from .combinators import fold, scan, scan_same
from .curves import distance_matrix, euclidean, prepare

__all__ = [
    "DEFAULT_DEPTH_LIMIT",
    "BRUTEFORCE_LIMIT",
    "frechet_maxmin",
    "frechet_recursive",
    "frechet_full_matrix",
    "frechet_prefix_distances",
    "frechet_inplace",
    "frechet_next",
    "frechet_next_scan",
    "frechet_fast",
    "frechet_fast_scan",
    "frechet_linear",
    "frechet_bruteforce",
    "monotone_couplings",
    "hausdorff_discrete",
    "check_workspace",
]

DEFAULT_DEPTH_LIMIT = 10_000
BRUTEFORCE_LIMIT = 14

# below this depth the interpreter's default stack is enough
_SHALLOW = 500


def frechet_maxmin(acc, pair):
    """Scan step of one DP row: ``max(min(acc, pair[0]), pair[1])``."""
    return max(min(acc, pair[0]), pair[1])


def check_workspace(workspace, size, dtype):
    """Return ``workspace`` (or a new buffer) after checking it holds ``size`` slots."""
    if workspace is None:
        return np.empty(size, dtype=dtype)
    if not isinstance(workspace, np.ndarray) or workspace.ndim != 1:
        raise ValueError("workspace must be a 1-D numpy array")
    if workspace.shape[0] != size:
        raise ValueError(
            f"workspace has {workspace.shape[0]} slots, kernel needs exactly {size}"
        )
    if not workspace.flags.c_contiguous or not workspace.flags.writeable:
        raise ValueError("workspace must be writeable and contiguous")
    return workspace


# -- reference: memoised recursion --------------------------------------------


def _call_with_deep_stack(fn, depth):
    if depth <= _SHALLOW:
        return fn()
    box = {}

    def target():
        try:
            box["value"] = fn()
        except BaseException as exc:  # re-raised in the caller's thread
            box["error"] = exc

    old_limit = sys.getrecursionlimit()
    old_stack = threading.stack_size()
    try:
        sys.setrecursionlimit(max(old_limit, depth + 1_000))
        threading.stack_size(min(1 << 30, max(64 << 20, depth * 8192)))
        worker = threading.Thread(target=target, name="frechet-recursive")
        worker.start()
        worker.join()
    finally:
        threading.stack_size(old_stack)
        sys.setrecursionlimit(old_limit)
    if "error" in box:
        raise box["error"]
    return box["value"]


def frechet_recursive(p, q, metric=euclidean, *, depth_limit=DEFAULT_DEPTH_LIMIT):
    """Discrete Fréchet distance by memoised recursion.

    This is the original top-down formulation, kept as a readable reference.
    Recursion depth grows to ``P + Q - 1``; inputs with ``P + Q`` above
    ``depth_limit`` are refused. Use :func:`frechet_linear` in production.

    Raises
    ------
    RecursionError
        If ``len(p) + len(q) > depth_limit``.
    """
    p, q, metric = prepare(p, q, metric)
    P, Q = len(p), len(q)
    if P + Q > depth_limit:
        raise RecursionError(
            f"P + Q = {P + Q} exceeds the recursion depth limit {depth_limit}; "
            "use frechet_linear or frechet_fast for long curves"
        )
    pts, qts, f = p.points, q.points, metric.kernel_for(p.dim)
    M = [[-1.0] * Q for _ in range(P)]

    def ev(i, j):
        if M[i][j] > -1:
            return M[i][j]
        d = float(f(pts, i, qts, j))
        if i == 0 and j == 0:
            M[i][j] = d
        elif i > 0 and j == 0:
            M[i][j] = max(ev(i - 1, 0), d)
        elif i == 0 and j > 0:
            M[i][j] = max(ev(0, j - 1), d)
        else:
            M[i][j] = max(min(ev(i - 1, j), ev(i - 1, j - 1), ev(i, j - 1)), d)
        return M[i][j]

    return _call_with_deep_stack(lambda: ev(P - 1, Q - 1), P + Q)


# -- bottom-up, full matrix ----------------------------------------------------


@njit(**KERNEL_OPTIONS)
def _full_matrix(p, q, f, M):
    P, Q = p.shape[0], q.shape[0]
    for i in range(P):
        for j in range(Q):
            d = cast_like(M, f(p, i, q, j))
            if i == 0 and j == 0:
                M[i, j] = d
            elif i > 0 and j == 0:
                M[i, j] = vmax(M[i - 1, 0], d)
            elif i == 0 and j > 0:
                M[i, j] = vmax(M[0, j - 1], d)
            else:
                M[i, j] = vmax(vmin(vmin(M[i - 1, j], M[i - 1, j - 1]), M[i, j - 1]), d)
    return M[P - 1, Q - 1]


def _alloc_matrix(P, Q, dtype):
    try:
        return np.empty((P, Q), dtype=dtype)
    except MemoryError as exc:
        raise MemoryError(
            f"cannot allocate the {P}x{Q} DP matrix; use frechet_linear instead"
        ) from exc


def frechet_full_matrix(p, q, metric=euclidean) -> float:
    """Discrete Fréchet distance from an explicitly allocated ``P x Q`` table.

    >>> frechet_full_matrix([[0, 0], [2, 0]], [[0, 0], [1, 2], [2, 0]])
    2.23606797749979
    """
    p, q, metric = prepare(p, q, metric)
    M = _alloc_matrix(len(p), len(q), p.dtype)
    return float(_full_matrix(p.points, q.points, metric.kernel_for(p.dim), M))


def frechet_prefix_distances(p, q, metric=euclidean) -> np.ndarray:
    """The full DP table: entry ``[i, j]`` is the distance of the prefixes
    ``p[:i+1]`` and ``q[:j+1]``."""
    p, q, metric = prepare(p, q, metric)
    M = _alloc_matrix(len(p), len(q), p.dtype)
    _full_matrix(p.points, q.points, metric.kernel_for(p.dim), M)
    return M


# -- in place on a distance matrix ---------------------------------------------


@njit(**KERNEL_OPTIONS)
def _inplace(d):
    P, Q = d.shape
    for i in range(1, P):
        d[i, 0] = vmax(d[i - 1, 0], d[i, 0])
    for j in range(1, Q):
        d[0, j] = vmax(d[0, j - 1], d[0, j])
    for i in range(1, P):
        for j in range(1, Q):
            d[i, j] = vmax(vmin(vmin(d[i - 1, j], d[i - 1, j - 1]), d[i, j - 1]), d[i, j])
    return d[P - 1, Q - 1]


def frechet_inplace(d) -> float:
    """Discrete Fréchet distance computed in place on a distance matrix.

    The first column and row are replaced by their running maxima and the
    interior by the DP recurrence, so ``d`` ends up holding the DP table.
    Pass a copy if the matrix is still needed.
    """
    if not isinstance(d, np.ndarray) or d.dtype.kind != "f":
        d = np.array(d, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] < 1 or d.shape[1] < 1:
        raise ValueError(f"expected a non-empty (P, Q) matrix, got shape {d.shape}")
    if not d.flags.writeable:
        raise ValueError("distance matrix must be writeable")
    return float(_inplace(d))


# -- one state row at a time -----------------------------------------------------


@njit(**KERNEL_OPTIONS)
def _frechet_next(a, x, out):
    # ``prev`` holds the pre-update a[j-1]; this keeps the element-wise min
    # simultaneous even when ``out`` is ``a``
    prev = a[0]
    acc = cast_like(out, vmax(prev, x[0]))
    out[0] = acc
    for j in range(1, a.shape[0]):
        cur = a[j]
        acc = cast_like(out, vmax(vmin(acc, vmin(prev, cur)), x[j]))
        out[j] = acc
        prev = cur
    return out


def frechet_next(a, x, out=None) -> np.ndarray:
    """Advance the state row ``a`` (row ``i-1`` of the DP table) by the
    distance row ``x`` (row ``i`` of ``d``).

    Equivalent to ``scan(frechet_maxmin, max(a[0], x[0]), zip(b[1:], x[1:]))``
    with ``b[j] = min(a[j-1], a[j])`` taken from the old ``a``; see
    :func:`frechet_next_scan`. ``out`` may be ``a`` itself for an in-place
    update.
    """
    a = np.asarray(a)
    x = np.asarray(x)
    if a.ndim != 1 or a.shape != x.shape or a.shape[0] < 1:
        raise ValueError(f"row length mismatch: {a.shape} vs {x.shape}")
    if out is None:
        out = np.empty_like(a)
    elif out.shape != a.shape:
        raise ValueError(f"output has shape {out.shape}, expected {a.shape}")
    return _frechet_next(a, x, out)


def frechet_next_scan(a, x) -> list:
    """:func:`frechet_next` written directly with :func:`~curvedist.combinators.scan`."""
    a, x = list(a), list(x)
    if len(a) != len(x) or not a:
        raise ValueError(f"row length mismatch: {len(a)} vs {len(x)}")
    b = [min(a[j - 1], a[j]) for j in range(1, len(a))]
    return scan(frechet_maxmin, max(a[0], x[0]), zip(b, x[1:]))


def frechet_fast(rows, workspace=None) -> float:
    """Discrete Fréchet distance as a fold over distance-matrix rows.

    Parameters
    ----------
    rows : iterable of 1-D arrays
        The rows of ``d`` in order, e.g. a :class:`~curvedist.curves.RowSource`
        (lazy, ``O(Q)`` memory) or a 2-D array.
    workspace : ndarray, optional
        Caller-provided state row of exactly ``Q`` slots. On return it holds
        the last row of the DP table.
    """
    it = iter(rows)
    try:
        first = np.asarray(next(it))
    except StopIteration:
        raise ValueError("frechet_fast needs at least one row") from None
    if first.ndim != 1 or first.shape[0] < 1:
        raise ValueError("rows must be non-empty 1-D arrays")
    v = check_workspace(workspace, first.shape[0], first.dtype)
    v[:] = scan_same(max, first)
    v = fold(lambda acc, row: frechet_next(acc, row, out=acc), v, it)
    return float(v[-1])


def frechet_fast_scan(d) -> float:
    """Pure-Python fold/scan form over a distance matrix (slow; for checking)."""
    rows = [list(r) for r in d]
    if not rows:
        raise ValueError("frechet_fast_scan needs at least one row")
    return float(fold(frechet_next_scan, scan_same(max, rows[0]), rows[1:])[-1])


@njit(**KERNEL_OPTIONS)
def _linear(p, q, f, v):
    P, Q = p.shape[0], q.shape[0]
    acc = cast_like(v, f(p, 0, q, 0))
    v[0] = acc
    for j in range(1, Q):
        acc = cast_like(v, vmax(acc, f(p, 0, q, j)))
        v[j] = acc
    for i in range(1, P):
        prev = v[0]
        acc = cast_like(v, vmax(prev, f(p, i, q, 0)))
        v[0] = acc
        for j in range(1, Q):
            cur = v[j]
            acc = cast_like(v, vmax(vmin(acc, vmin(prev, cur)), f(p, i, q, j)))
            v[j] = acc
            prev = cur
    return v[Q - 1]


def frechet_linear(p, q, metric=euclidean, workspace=None) -> float:
    """Discrete Fréchet distance with one length-``Q`` state row.

    The metric is evaluated lazily per cell, so nothing of size ``P x Q`` is
    ever allocated. ``workspace``, if given, must have exactly ``len(q)``
    slots of the curves' dtype; on return it holds the last DP row.

    >>> frechet_linear([[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 1], [2, 1]])
    1.0
    """
    p, q, metric = prepare(p, q, metric)
    v = check_workspace(workspace, len(q), p.dtype)
    return float(_linear(p.points, q.points, metric.kernel_for(p.dim), v))


# -- oracles -------------------------------------------------------------------


def monotone_couplings(P, Q):
    """Yield every monotone coupling of index sequences ``0..P-1`` and ``0..Q-1``.

    A coupling starts at ``(0, 0)``, ends at ``(P-1, Q-1)`` and advances one
    or both indices by exactly one per step.
    """
    path = [(0, 0)]

    def walk(i, j):
        if i == P - 1 and j == Q - 1:
            yield tuple(path)
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            ni, nj = i + di, j + dj
            if ni < P and nj < Q:
                path.append((ni, nj))
                yield from walk(ni, nj)
                path.pop()

    yield from walk(0, 0)


def frechet_bruteforce(p, q, metric=euclidean, *, limit=BRUTEFORCE_LIMIT) -> float:
    """Minimum over all monotone couplings of the largest matched distance.

    Exponential in ``P + Q``; refuses inputs with ``P + Q > limit``.
    """
    p, q, metric = prepare(p, q, metric)
    P, Q = len(p), len(q)
    if P + Q > limit:
        raise ValueError(f"P + Q = {P + Q} exceeds the brute-force limit {limit}")
    d = distance_matrix(p, q, metric).tolist()
    best = math.inf
    for coupling in monotone_couplings(P, Q):
        best = min(best, max(d[i][j] for i, j in coupling))
    return float(best)


def hausdorff_discrete(p, q, metric=euclidean) -> float:
    """Symmetric Hausdorff distance between the two point sets."""
    d = distance_matrix(p, q, metric)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
