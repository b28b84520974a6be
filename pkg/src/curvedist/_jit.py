"""Small jitted helpers shared by the kernels.

The selection helpers deliberately avoid the builtin ``max``/``min``: the
builtins carry NaN handling that keeps LLVM from emitting packed
``vmaxps``/``vminps`` in lane loops. Inputs are NaN-free by construction
(curves reject non-finite coordinates), so a plain compare-and-select is exact.
"""

from numba import njit
from numba.extending import overload

__all__ = ["vmax", "vmin", "cast_like", "KERNEL_OPTIONS"]

KERNEL_OPTIONS = {"nogil": True}


@njit(inline="always")
def vmax(a, b):
    return a if a > b else b


@njit(inline="always")
def vmin(a, b):
    return a if a < b else b


def cast_like(arr, x):
    """Convert ``x`` to the element type of ``arr`` (jit-only)."""
    raise NotImplementedError("cast_like is only available inside jitted code")


@overload(cast_like, inline="always")
def _cast_like_impl(arr, x):
    dtype = arr.dtype

    def impl(arr, x):
        return dtype(x)

    return impl
