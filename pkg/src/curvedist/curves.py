"""Polygonal curves, point metrics and distance-matrix production."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
from numba import njit
from numba.extending import is_jitted

from ._jit import KERNEL_OPTIONS, cast_like, vmax

__all__ = [
    "DimensionMismatchError",
    "PolygonalCurve",
    "as_curve",
    "coerce_pair",
    "Metric",
    "make_metric",
    "euclidean",
    "sq_euclidean",
    "haversine",
    "METRICS",
    "get_metric",
    "distance_matrix",
    "RowSource",
    "row_source",
    "sample_width",
    "EARTH_RADIUS_M",
]

EARTH_RADIUS_M = 6_371_000.0


class DimensionMismatchError(ValueError):
    pass


class PolygonalCurve:
    """An immutable sequence of ``P >= 1`` points in ``D >= 1`` dimensions.

    Parameters
    ----------
    points : array_like
        ``(P, D)`` coordinates. A 1-D input is read as ``P`` points in one
        dimension.
    dtype : numpy dtype, optional
        ``float32`` or ``float64``. Defaults to ``float32`` for ``float32``
        input and ``float64`` for everything else.
    id : str, optional
        Identifier carried through CSV round trips.

    Raises
    ------
    ValueError
        For empty curves and non-finite coordinates.
    """

    __slots__ = ("_points", "id")

    def __init__(self, points, dtype=None, id: Optional[str] = None):
        arr = np.asarray(points)
        if dtype is None:
            dtype = np.float32 if arr.dtype == np.float32 else np.float64
        dtype = np.dtype(dtype)
        if dtype not in (np.float32, np.float64):
            raise ValueError(f"unsupported dtype {dtype}; use float32 or float64")
        arr = np.array(arr, dtype=dtype, order="C", copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ValueError(f"points must be a (P, D) array, got shape {arr.shape}")
        if arr.shape[0] == 0:
            raise ValueError("a curve needs at least one point")
        if arr.shape[1] == 0:
            raise ValueError("points need at least one coordinate")
        if not np.isfinite(arr).all():
            raise ValueError("curve coordinates must be finite (no NaN or inf)")
        arr.flags.writeable = False
        self._points = arr
        self.id = id

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @property
    def dtype(self) -> np.dtype:
        return self._points.dtype

    def __len__(self) -> int:
        return self._points.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._points
        return self._points.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, PolygonalCurve):
            return NotImplemented
        return (
            self.id == other.id
            and self.dtype == other.dtype
            and np.array_equal(self._points, other._points)
        )

    __hash__ = None

    def astype(self, dtype) -> "PolygonalCurve":
        if np.dtype(dtype) == self.dtype:
            return self
        return PolygonalCurve(self._points, dtype=dtype, id=self.id)

    def repeat_points(self, counts) -> "PolygonalCurve":
        """Return a copy where point ``k`` appears ``counts[k]`` times."""
        counts = np.asarray(counts)
        if counts.shape != (len(self),) or (counts < 1).any():
            raise ValueError("counts must hold one positive integer per point")
        return PolygonalCurve(np.repeat(self._points, counts, axis=0), id=self.id)

    def __repr__(self):
        tag = f" id={self.id!r}" if self.id is not None else ""
        return f"PolygonalCurve(P={len(self)}, D={self.dim}, dtype={self.dtype}{tag})"


def as_curve(x, dtype=None) -> PolygonalCurve:
    if isinstance(x, PolygonalCurve):
        return x if dtype is None else x.astype(dtype)
    return PolygonalCurve(x, dtype=dtype)


def coerce_pair(p, q, dtype=None):
    """Convert ``p`` and ``q`` to curves of a common dtype and dimension."""
    p = as_curve(p, dtype)
    q = as_curve(q, dtype)
    if p.dim != q.dim:
        raise DimensionMismatchError(f"dimension mismatch: {p.dim} vs {q.dim}")
    if p.dtype != q.dtype:
        common = np.result_type(p.dtype, q.dtype)
        p, q = p.astype(common), q.astype(common)
    return p, q


@dataclass(frozen=True)
class Metric:
    """A point-pair distance usable by every kernel.

    ``kernel`` is a jitted function ``kernel(a, i, b, j)`` returning the
    distance between rows ``a[i]`` and ``b[j]`` of two ``(n, D)`` arrays, in
    the arrays' own precision. ``validate``, when given, is called with each
    ``(P, D)`` coordinate array before a computation and raises
    ``ValueError`` on unsupported input. ``by_dim`` optionally maps a
    dimension to a specialised kernel; a branch on ``D`` inside the kernel
    would keep the lane loops from vectorising.
    """

    name: str
    kernel: Callable
    validate: Optional[Callable[[np.ndarray], None]] = None
    by_dim: Mapping[int, Callable] = field(default_factory=dict)

    def check(self, points: np.ndarray) -> None:
        if self.validate is not None:
            self.validate(points)

    def kernel_for(self, dim: int) -> Callable:
        return self.by_dim.get(dim, self.kernel)

    def __call__(self, a, b) -> float:
        a = np.atleast_1d(np.asarray(a, dtype=np.float64))
        b = np.atleast_1d(np.asarray(b, dtype=np.float64))
        if a.ndim != 1 or b.ndim != 1:
            raise ValueError("a metric compares two single points")
        if a.shape != b.shape:
            raise DimensionMismatchError(
                f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}"
            )
        a, b = a.reshape(1, -1), b.reshape(1, -1)
        self.check(a)
        self.check(b)
        return float(self.kernel_for(a.shape[1])(a, 0, b, 0))


def make_metric(name: str, fn, validate=None) -> Metric:
    """Wrap a point function ``fn(a, b) -> float`` as a :class:`Metric`.

    ``fn`` receives two 1-D coordinate arrays and must be compilable by
    numba in nopython mode.
    """
    point_fn = fn if is_jitted(fn) else njit(fn)

    @njit(inline="always")
    def kernel(a, i, b, j):
        return cast_like(a, point_fn(a[i], b[j]))

    return Metric(name, kernel, validate)


@njit(inline="always")
def _sq_euclidean(a, i, b, j):
    s = cast_like(a, 0)
    for c in range(a.shape[1]):
        t = a[i, c] - b[j, c]
        s += t * t
    return s


@njit(inline="always")
def _sq_euclidean_2d(a, i, b, j):
    dx = a[i, 0] - b[j, 0]
    dy = a[i, 1] - b[j, 1]
    return dx * dx + dy * dy


@njit(inline="always")
def _euclidean(a, i, b, j):
    return math.sqrt(_sq_euclidean(a, i, b, j))


@njit(inline="always")
def _euclidean_2d(a, i, b, j):
    return math.sqrt(_sq_euclidean_2d(a, i, b, j))


@njit(inline="always")
def _haversine(a, i, b, j):
    # evaluated in float64 regardless of storage precision
    lat1 = math.radians(float(a[i, 0]))
    lat2 = math.radians(float(b[j, 0]))
    dlat = lat2 - lat1
    dlon = math.radians(float(b[j, 1]) - float(a[i, 1]))
    s1 = math.sin(0.5 * dlat)
    s2 = math.sin(0.5 * dlon)
    h = s1 * s1 + (math.cos(lat1) * math.cos(lat2)) * (s2 * s2)
    h = h if h < 1.0 else 1.0
    return cast_like(a, 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(h)))


def _square_safe(points: np.ndarray) -> None:
    # differences are squared without rescaling; keep the sum finite
    limit = math.sqrt(np.finfo(points.dtype).max / (4.0 * points.shape[1]))
    if points.size and float(np.abs(points).max()) > limit:
        raise ValueError(
            f"coordinates exceed {limit:.3g}; squared differences would overflow "
            f"{points.dtype}"
        )


def _check_latlon(points: np.ndarray) -> None:
    if points.shape[1] != 2:
        raise DimensionMismatchError("haversine needs (lat, lon) points, D = 2")
    lat, lon = points[:, 0], points[:, 1]
    if (np.abs(lat) > 90).any():
        raise ValueError("latitude outside [-90, 90] degrees")
    if (np.abs(lon) > 180).any():
        raise ValueError("longitude outside [-180, 180] degrees")


euclidean = Metric("euclidean", _euclidean, _square_safe, {2: _euclidean_2d})
"""Euclidean (l2) distance, ``sqrt(sum((a - b)**2))`` in the curve precision."""

sq_euclidean = Metric("sq-euclidean", _sq_euclidean, _square_safe, {2: _sq_euclidean_2d})
"""Squared Euclidean distance. Not a metric: violates the triangle inequality."""

haversine = Metric("haversine", _haversine, _check_latlon)
"""Great-circle distance in metres between (lat, lon) points in degrees."""

METRICS = {m.name: m for m in (euclidean, sq_euclidean, haversine)}


def get_metric(metric) -> Metric:
    if isinstance(metric, Metric):
        return metric
    try:
        return METRICS[metric]
    except KeyError:
        raise ValueError(
            f"unknown metric {metric!r}; choose from {sorted(METRICS)}"
        ) from None


def prepare(p, q, metric, dtype=None):
    """Coerce and validate the inputs shared by every curve-pair kernel."""
    metric = get_metric(metric)
    p, q = coerce_pair(p, q, dtype)
    metric.check(p.points)
    metric.check(q.points)
    return p, q, metric


@njit(**KERNEL_OPTIONS)
def _fill_row(p, i, q, f, out):
    for j in range(q.shape[0]):
        out[j] = f(p, i, q, j)


@njit(**KERNEL_OPTIONS)
def _fill_matrix(p, q, f, out):
    for i in range(p.shape[0]):
        for j in range(q.shape[0]):
            out[i, j] = f(p, i, q, j)


@njit(**KERNEL_OPTIONS)
def _sample_width(p, f):
    w = cast_like(p, 0)
    for k in range(p.shape[0] - 1):
        w = vmax(w, f(p, k, p, k + 1))
    return w


def distance_matrix(p, q, metric=euclidean, dtype=None) -> np.ndarray:
    """Eager ``(P, Q)`` matrix with entries ``metric(p[i], q[j])``.

    Examples
    --------
    >>> distance_matrix([[0, 0]], [[0, 0], [3, 4]]).tolist()
    [[0.0, 5.0]]
    """
    p, q, metric = prepare(p, q, metric, dtype)
    out = np.empty((len(p), len(q)), dtype=p.dtype)
    _fill_matrix(p.points, q.points, metric.kernel_for(p.dim), out)
    return out


class RowSource:
    """Lazy producer of the distance-matrix rows ``d[0], d[1], ...``.

    Each row is computed on demand into a fresh length-``Q`` array, so a
    consumer that drops rows after use never holds more than ``O(Q)``
    distances. Single consumer only.
    """

    def __init__(self, p, q, metric=euclidean, dtype=None):
        self._p, self._q, self._metric = prepare(p, q, metric, dtype)
        self._kernel = self._metric.kernel_for(self._p.dim)
        self._next = 0

    @property
    def shape(self):
        return len(self._p), len(self._q)

    @property
    def row_length(self) -> int:
        return len(self._q)

    @property
    def dtype(self) -> np.dtype:
        return self._p.dtype

    @property
    def remaining(self) -> int:
        return len(self._p) - self._next

    def __iter__(self):
        return self

    def __next__(self) -> np.ndarray:
        i = self._next
        if i >= len(self._p):
            raise StopIteration
        row = np.empty(len(self._q), dtype=self._p.dtype)
        _fill_row(self._p.points, i, self._q.points, self._kernel, row)
        self._next = i + 1
        return row


def row_source(p, q, metric=euclidean, dtype=None) -> RowSource:
    return RowSource(p, q, metric, dtype)


def sample_width(p, metric=euclidean) -> float:
    """Largest distance between adjacent points; 0 for a single point."""
    metric = get_metric(metric)
    p = as_curve(p)
    metric.check(p.points)
    return float(_sample_width(p.points, metric.kernel_for(p.dim)))
