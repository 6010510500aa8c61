"""Sparse chains/cochains and sparse operators between graded chain spaces."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp


@dataclass
class SparseChain:
    """Finitely supported coefficient vector on the cells of one degree.

    Serves as both chain and cochain; ``p`` only tags the summability exponent.
    """

    degree: int
    coeffs: dict = field(default_factory=dict)
    p: float = 2.0

    def __post_init__(self):
        self.coeffs = {k: v for k, v in self.coeffs.items() if v != 0}

    def __add__(self, other: "SparseChain") -> "SparseChain":
        _same_degree(self, other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return SparseChain(self.degree, out, self.p)

    def __neg__(self) -> "SparseChain":
        return SparseChain(self.degree, {k: -v for k, v in self.coeffs.items()}, self.p)

    def __sub__(self, other: "SparseChain") -> "SparseChain":
        return self + (-other)

    def __mul__(self, s) -> "SparseChain":
        return SparseChain(self.degree, {k: s * v for k, v in self.coeffs.items()}, self.p)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseChain):
            return NotImplemented
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __getitem__(self, cell: str):
        return self.coeffs.get(cell, 0)

    def support(self) -> list:
        return sorted(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def inner(self, other: "SparseChain"):
        _same_degree(self, other)
        small, big = sorted((self.coeffs, other.coeffs), key=len)
        return sum((v * big[k] for k, v in small.items() if k in big), 0)

    def to_vector(self, ids: Iterable[str], dtype=float) -> np.ndarray:
        ids = list(ids)
        vec = np.zeros(len(ids), dtype=dtype)
        pos = {c: i for i, c in enumerate(ids)}
        for k, v in self.coeffs.items():
            vec[pos[k]] = v
        return vec

    @classmethod
    def from_vector(cls, degree: int, ids: Iterable[str], vec, p: float = 2.0) -> "SparseChain":
        return cls(degree, {c: (v.item() if hasattr(v, "item") else v) for c, v in zip(ids, vec) if v != 0}, p)

    def mod2(self) -> "SparseChain":
        return SparseChain(self.degree, {k: int(v) % 2 for k, v in self.coeffs.items()}, self.p)


def _same_degree(a: SparseChain, b: SparseChain) -> None:
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} vs {b.degree}")


class CellOperator:
    """Sparse linear map between graded chain spaces.

    ``entries[(i, j)]`` is the coefficient of target cell ``rows[i]`` in the
    image of source cell ``cols[j]``.  Entries stay exact (int/Fraction) unless
    the operator was built from floats.
    """

    def __init__(
        self,
        source_degree: int,
        target_degree: int,
        rows: Iterable[str],
        cols: Iterable[str],
        entries: Mapping | None = None,
        vicinality: int | None = None,
        entry_bound=None,
    ):
        self.source_degree = source_degree
        self.target_degree = target_degree
        self.rows = tuple(rows)
        self.cols = tuple(cols)
        self.entries = {k: v for k, v in (entries or {}).items() if v != 0}
        self.vicinality = vicinality
        self.entry_bound = entry_bound
        self._row_pos = None
        self._col_pos = None

    # -- construction -----------------------------------------------------
    @classmethod
    def identity(cls, degree: int, ids: Iterable[str]) -> "CellOperator":
        ids = tuple(ids)
        return cls(degree, degree, ids, ids, {(i, i): 1 for i in range(len(ids))})

    @classmethod
    def zero(cls, source_degree, target_degree, rows, cols) -> "CellOperator":
        return cls(source_degree, target_degree, rows, cols, {})

    @classmethod
    def from_dense(cls, source_degree, target_degree, rows, cols, matrix) -> "CellOperator":
        m = np.asarray(matrix) if not isinstance(matrix, list) else matrix
        entries = {}
        for i, row in enumerate(m):
            for j, v in enumerate(row):
                if v != 0:
                    entries[(i, j)] = v.item() if hasattr(v, "item") else v
        return cls(source_degree, target_degree, rows, cols, entries)

    @classmethod
    def from_columns(cls, source_degree, target_degree, rows, cols, columns) -> "CellOperator":
        """Build from a mapping ``source-cell -> {target-cell: value}``."""
        rows = tuple(rows)
        cols = tuple(cols)
        rpos = {r: i for i, r in enumerate(rows)}
        entries = {}
        for j, c in enumerate(cols):
            for r, v in columns.get(c, {}).items():
                if v:
                    entries[(rpos[r], j)] = v
        return cls(source_degree, target_degree, rows, cols, entries)

    # -- basic queries ------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    @property
    def row_pos(self) -> dict:
        if self._row_pos is None:
            self._row_pos = {r: i for i, r in enumerate(self.rows)}
        return self._row_pos

    @property
    def col_pos(self) -> dict:
        if self._col_pos is None:
            self._col_pos = {c: j for j, c in enumerate(self.cols)}
        return self._col_pos

    def __getitem__(self, key):
        r, c = key
        return self.entries.get((self.row_pos[r], self.col_pos[c]), 0)

    def is_zero(self) -> bool:
        return not self.entries

    def max_abs(self):
        return max((abs(v) for v in self.entries.values()), default=0)

    def column(self, j: int) -> dict:
        return {self.rows[i]: v for (i, jj), v in self.entries.items() if jj == j}

    def row_dicts(self) -> list[dict]:
        out = [dict() for _ in self.rows]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def col_dicts(self) -> list[dict]:
        out = [dict() for _ in self.cols]
        for (i, j), v in self.entries.items():
            out[j][i] = v
        return out

    def row_counts(self) -> np.ndarray:
        counts = np.zeros(len(self.rows), dtype=np.int64)
        for (i, _j) in self.entries:
            counts[i] += 1
        return counts

    def col_counts(self) -> np.ndarray:
        counts = np.zeros(len(self.cols), dtype=np.int64)
        for (_i, j) in self.entries:
            counts[j] += 1
        return counts

    # -- algebra ---------------------------------------------------------
    @property
    def T(self) -> "CellOperator":
        return CellOperator(
            self.target_degree,
            self.source_degree,
            self.cols,
            self.rows,
            {(j, i): v for (i, j), v in self.entries.items()},
        )

    def _check_same(self, other: "CellOperator") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("operators act on different cell bases")

    def __add__(self, other: "CellOperator") -> "CellOperator":
        self._check_same(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return CellOperator(self.source_degree, self.target_degree, self.rows, self.cols, out)

    def __neg__(self) -> "CellOperator":
        return CellOperator(
            self.source_degree, self.target_degree, self.rows, self.cols,
            {k: -v for k, v in self.entries.items()},
        )

    def __sub__(self, other: "CellOperator") -> "CellOperator":
        return self + (-other)

    def __mul__(self, s) -> "CellOperator":
        return CellOperator(
            self.source_degree, self.target_degree, self.rows, self.cols,
            {k: s * v for k, v in self.entries.items()},
        )

    __rmul__ = __mul__

    def __matmul__(self, other: "CellOperator") -> "CellOperator":
        if self.cols != other.rows:
            raise ValueError("inner cell bases do not match")
        left_by_col = {}
        for (i, k), v in self.entries.items():
            left_by_col.setdefault(k, []).append((i, v))
        out = {}
        for (k, j), w in other.entries.items():
            for i, v in left_by_col.get(k, ()):
                key = (i, j)
                out[key] = out.get(key, 0) + v * w
        return CellOperator(other.source_degree, self.target_degree, self.rows, other.cols, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CellOperator):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.entries == other.entries

    def apply(self, chain: SparseChain) -> SparseChain:
        out = {}
        cpos = self.col_pos
        by_col = {}
        for (i, j), v in self.entries.items():
            by_col.setdefault(j, []).append((i, v))
        for cell, a in chain.coeffs.items():
            j = cpos.get(cell)
            if j is None:
                raise KeyError(f"cell {cell!r} is not in the operator's source basis")
            for i, v in by_col.get(j, ()):
                r = self.rows[i]
                out[r] = out.get(r, 0) + v * a
        return SparseChain(self.target_degree, out, chain.p)

    # -- conversion ----------------------------------------------------------
    def to_scipy(self, dtype=float) -> sp.csr_matrix:
        if not self.entries:
            return sp.csr_matrix(self.shape, dtype=dtype)
        keys = list(self.entries)
        r = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
        c = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
        v = np.array([float(self.entries[k]) for k in keys], dtype=dtype)
        return sp.csr_matrix((v, (r, c)), shape=self.shape)

    def toarray(self, dtype=float) -> np.ndarray:
        out = np.zeros(self.shape, dtype=dtype)
        for (i, j), v in self.entries.items():
            out[i, j] = v
        return out

    def to_fraction_rows(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * len(self.cols) for _ in self.rows]
        for (i, j), v in self.entries.items():
            out[i][j] = Fraction(v)
        return out

    def __repr__(self) -> str:
        return (
            f"CellOperator({self.source_degree}->{self.target_degree}, "
            f"shape={self.shape}, nnz={self.nnz})"
        )
