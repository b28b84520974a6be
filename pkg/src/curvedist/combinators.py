"""Left scan and left fold.

``scan`` prepends its initial value, so ``len(scan(f, init, xs)) ==
len(xs) + 1``. The ``*_same`` forms take the first element as the initial
value and are only defined for non-empty input.

These are thin wrappers over :func:`itertools.accumulate` and
:func:`functools.reduce`, which have exactly the required semantics. The
kernels in :mod:`curvedist.frechet` and :mod:`curvedist.related` are written
in terms of them; the compiled fast paths fuse the same loops.

Note that the Fréchet step ``max(min(acc, b), x)`` is not associative, so
there is deliberately no parallel (tree-shaped) scan here.
"""

from functools import reduce
from itertools import accumulate

__all__ = ["scan", "scan_same", "scan_into", "fold", "fold_same"]


def scan(f, init, xs):
    """Inclusive left scan with the initial value prepended.

    Parameters
    ----------
    f : callable
        Binary step ``f(acc, x) -> acc``.
    init
        Initial accumulator; always the first output element.
    xs : iterable
        Elements fed to ``f`` left to right.

    Returns
    -------
    list
        ``[init, f(init, xs[0]), f(f(init, xs[0]), xs[1]), ...]``.

    Examples
    --------
    >>> scan(max, 1, [3, 1, 4])
    [1, 3, 3, 4]
    >>> scan(max, 7, [])
    [7]
    """
    return list(accumulate(xs, f, initial=init))


def scan_same(f, xs):
    """Scan using the first element of ``xs`` as the initial value.

    >>> scan_same(max, [1, 3, 2])
    [1, 3, 3]
    """
    it = iter(xs)
    try:
        first = next(it)
    except StopIteration:
        raise ValueError("scan_same requires nonempty sequence") from None
    return list(accumulate(it, f, initial=first))


def scan_into(f, init, xs, out):
    """Like :func:`scan`, but writes into ``out`` and returns it.

    ``out`` must have room for exactly ``len(xs) + 1`` elements.
    """
    n = len(xs) + 1
    if len(out) != n:
        raise ValueError(f"output buffer has length {len(out)}, expected {n}")
    for k, t in enumerate(accumulate(xs, f, initial=init)):
        out[k] = t
    return out


def fold(f, init, xs):
    """Left fold; equals the last element of ``scan(f, init, xs)``.

    >>> fold(max, 0, [3, 1, 4])
    4
    >>> fold(max, 9, [])
    9
    """
    return reduce(f, xs, init)


def fold_same(f, xs):
    """Fold using the first element of ``xs`` as the initial value."""
    it = iter(xs)
    try:
        first = next(it)
    except StopIteration:
        raise ValueError("fold_same requires nonempty sequence") from None
    return reduce(f, it, first)
