"""Curve and benchmark CSV files.

Curve files have the header ``id,c0,...,c{D-1}`` and one point per line.
The points of a curve are contiguous; a curve is identified by its ``id``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import astuple

import numpy as np

from .curves import PolygonalCurve, as_curve

__all__ = ["CurveFileError", "load_curves_csv", "write_curves_csv", "write_bench_csv", "BENCH_HEADER"]

BENCH_HEADER = (
    "experiment",
    "variant",
    "n_curves",
    "curve_len",
    "lane_width",
    "reps",
    "warmup",
    "total_seconds",
    "pairs_per_second",
    "checksum",
)


class CurveFileError(ValueError):
    """Malformed curve file; ``line`` is 1-based, ``None`` for file-level errors."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


def _parse_header(path, header):
    if header is None:
        raise CurveFileError(path, 1, "empty file, expected header 'id,c0,...'")
    header = [h.strip() for h in header]
    if len(header) < 2 or header[0] != "id":
        raise CurveFileError(path, 1, f"bad header {','.join(header)!r}, expected 'id,c0,...'")
    for k, name in enumerate(header[1:]):
        if name != f"c{k}":
            raise CurveFileError(path, 1, f"bad column name {name!r}, expected 'c{k}'")
    return len(header) - 1


def load_curves_csv(path, dtype=np.float64) -> list:
    """Read every curve of a curve CSV file, in file order.

    Raises
    ------
    CurveFileError
        With the offending line number for malformed rows, non-numeric or
        non-finite values, and ids that reappear after another curve.
    """
    curves = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        D = _parse_header(path, next(reader, None))
        seen = set()
        cur_id, cur_pts = None, []

        def flush():
            curves.append(PolygonalCurve(np.array(cur_pts, dtype=dtype), dtype=dtype, id=cur_id))

        for row in reader:
            line = reader.line_num
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != D + 1:
                raise CurveFileError(path, line, f"expected {D + 1} fields, got {len(row)}")
            cid = row[0].strip()
            if not cid:
                raise CurveFileError(path, line, "empty id")
            try:
                pt = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise CurveFileError(path, line, str(exc)) from None
            if not all(math.isfinite(v) for v in pt):
                raise CurveFileError(path, line, "non-finite coordinate")
            if cid != cur_id:
                if cid in seen:
                    raise CurveFileError(path, line, f"points of curve {cid!r} are not contiguous")
                if cur_id is not None:
                    flush()
                seen.add(cid)
                cur_id, cur_pts = cid, []
            cur_pts.append(pt)
        if cur_id is None:
            raise CurveFileError(path, None, "no curves in file")
        flush()
    return curves


def write_curves_csv(curves, path) -> None:
    """Write curves so that :func:`load_curves_csv` reads them back exactly.

    Curves without an id are numbered by position.
    """
    curves = [as_curve(c) for c in curves]
    if not curves:
        raise ValueError("nothing to write")
    D = curves[0].dim
    if any(c.dim != D for c in curves):
        raise ValueError("curves have mixed dimensions")
    ids = [c.id if c.id is not None else str(k) for k, c in enumerate(curves)]
    if len(set(ids)) != len(ids):
        raise ValueError("curve ids are not unique")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id"] + [f"c{k}" for k in range(D)])
        for cid, c in zip(ids, curves):
            for pt in c.points.tolist():
                w.writerow([cid] + [repr(v) for v in pt])


def write_bench_csv(records, path) -> None:
    """One header line plus one line per benchmark record."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        for r in records:
            w.writerow([repr(v) if isinstance(v, float) else v for v in astuple(r)])
