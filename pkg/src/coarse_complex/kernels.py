"""Backend selection for the hot kernels.

The compiled extension ``_kernels`` is used when it imports; otherwise the
pure-Python versions in ``_kernels_py`` are used.  ``use_backend`` switches at
runtime (tests and the benchmark compare both).
"""
from __future__ import annotations

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

# compiled kernels keep intermediate products below 2**62
INT_LIMIT = 2**31


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _compiled is not None else [])


def use_backend(name: str) -> None:
    global BACKEND
    if name not in available_backends():
        raise ValueError(f"backend {name!r} is not available")
    BACKEND = name


def _impl():
    return _compiled if BACKEND == "cython" else _kernels_py


def _fits(matrix) -> bool:
    return all(abs(v) < INT_LIMIT for row in matrix for v in row)


def sparse_rank(rows, ncols: int) -> int:
    if BACKEND == "cython":
        try:
            return _compiled.sparse_rank(rows, ncols)
        except OverflowError:
            pass
    return _kernels_py.sparse_rank(rows, ncols)


def correspondence_search(DX, DY, threshold):
    if BACKEND == "cython" and _fits(DX) and _fits(DY) and abs(threshold) < INT_LIMIT:
        return _compiled.correspondence_search(DX, DY, int(threshold))
    return _kernels_py.correspondence_search(DX, DY, threshold)


def best_map_pair(DX, DY, scale: int):
    if BACKEND == "cython" and _fits(DX) and _fits(DY) and scale < 2**53:
        return _compiled.best_map_pair(DX, DY, scale)
    return _kernels_py.best_map_pair(DX, DY, scale)


def best_bijection(DX, DY):
    if BACKEND == "cython" and _fits(DX) and _fits(DY):
        return _compiled.best_bijection(DX, DY)
    return _kernels_py.best_bijection(DX, DY)
