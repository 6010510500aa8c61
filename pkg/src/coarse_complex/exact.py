"""Exact linear algebra over the rationals.

Ranks of large sparse integer matrices go through the compiled kernel when it
is available; everything else here is dense Fraction elimination sized for
desk-scale complexes.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from . import kernels
from .chains import CellOperator


def _integer_rows(rows: Sequence[dict]) -> list[dict]:
    out = []
    for row in rows:
        if any(isinstance(v, Fraction) and v.denominator != 1 for v in row.values()):
            m = 1
            for v in row.values():
                m = lcm(m, Fraction(v).denominator)
            out.append({c: int(Fraction(v) * m) for c, v in row.items() if v})
        else:
            out.append({c: int(v) for c, v in row.items() if v})
    return out


def sparse_rank(rows: Sequence[dict], ncols: int) -> int:
    """Exact rank of a matrix given as rows ``{col: int | Fraction}``."""
    return kernels.sparse_rank(_integer_rows(rows), ncols)


def rank(op: CellOperator) -> int:
    """Exact rank of an operator with integer or rational entries."""
    if op.nnz == 0:
        return 0
    n_rows, n_cols = op.shape
    # reduce the short side: rows of the transpose are the operator's columns
    if n_cols <= n_rows:
        return sparse_rank(op.col_dicts(), n_rows)
    return sparse_rank(op.row_dicts(), n_cols)


def rank_of_columns(columns: Sequence[dict], nrows: int) -> int:
    return sparse_rank(columns, nrows)


# ---------------------------------------------------------------------------
# dense Fraction elimination


def rref(matrix: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(v) for v in row] for row in matrix]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        pivot_row = m[r]
        nz = [j for j in range(c, n_cols) if pivot_row[j] != 0]
        for i in range(n_rows):
            if i != r:
                f = m[i][c]
                if f != 0:
                    row = m[i]
                    for j in nz:
                        row[j] -= f * pivot_row[j]
        pivots.append(c)
        r += 1
    return m, pivots


def nullspace(matrix: Sequence[Sequence], n_cols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel, one vector per free column."""
    if not matrix:
        n = n_cols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    red, pivots = rref(matrix)
    n = len(red[0])
    free = [j for j in range(n) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][f]
        basis.append(v)
    return basis


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One exact solution of ``matrix @ x = rhs`` or None if inconsistent."""
    n_rows = len(matrix)
    if n_rows == 0:
        return None
    n = len(matrix[0])
    aug = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, pc in enumerate(pivots):
        x[pc] = red[i][n]
    return x


def dense_rank(matrix: Sequence[Sequence]) -> int:
    if not matrix or not matrix[0]:
        return 0
    return len(rref(matrix)[1])


def clear_denominators(vec: Sequence[Fraction]) -> list[int]:
    m = 1
    for v in vec:
        m = lcm(m, Fraction(v).denominator)
    return [int(Fraction(v) * m) for v in vec]


def congruence_inertia(matrix: Sequence[Sequence]) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix.

    Symmetric Gaussian elimination: every step is a congruence, so Sylvester's
    law of inertia carries the counts through exactly.
    """
    a = [[Fraction(v) for v in row] for row in matrix]
    n = len(a)
    for i in range(n):
        for j in range(n):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix is not symmetric")
    pos = neg = 0
    active = list(range(n))
    while active:
        k = next((i for i in active if a[i][i] != 0), None)
        if k is None:
            pair = next(
                ((i, j) for i in active for j in active if i < j and a[i][j] != 0), None
            )
            if pair is None:
                break
            i, j = pair
            # row/col i += row/col j makes the (i, i) entry 2 a_ij != 0
            for t in range(n):
                a[i][t] += a[j][t]
            for t in range(n):
                a[t][i] += a[t][j]
            k = i
        piv = a[k][k]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        rest = [i for i in active if i != k]
        for i in rest:
            f = a[i][k] / piv
            if f != 0:
                for t in rest:
                    a[i][t] -= f * a[k][t]
        for i in rest:
            a[i][k] = a[k][i] = Fraction(0)
        active = rest
    return pos, neg, n - pos - neg
