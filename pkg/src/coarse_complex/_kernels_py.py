"""Pure-Python implementations of the hot kernels.

These are the reference versions; ``_kernels.pyx`` mirrors them over C integers.
Every function here accepts arbitrary-precision Python ints, so callers fall back
to this module whenever the compiled kernels would overflow.
"""
from __future__ import annotations

import math
from itertools import product
from math import gcd


def _content(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    return g


def sparse_rank(rows, ncols):
    """Exact rank of an integer matrix given as a list of ``{col: value}`` rows.

    Fraction-free row echelon reduction keyed on each row's largest column.
    Rows are divided by their content after every update so unit-pivot matrices
    (boundary matrices, mostly) keep small entries.
    """
    pivots = {}
    rank = 0
    for source in rows:
        row = {c: v for c, v in source.items() if v}
        while row:
            lead = max(row)
            piv = pivots.get(lead)
            if piv is None:
                g = _content(row)
                if row[lead] < 0:
                    g = -g
                if g != 1:
                    row = {c: v // g for c, v in row.items()}
                pivots[lead] = row
                rank += 1
                break
            a = piv[lead]
            b = row[lead]
            g = gcd(a, b)
            ma, mb = a // g, b // g
            new = {c: ma * v for c, v in row.items()}
            for c, v in piv.items():
                w = new.get(c, 0) - mb * v
                if w:
                    new[c] = w
                else:
                    new.pop(c, None)
            row = new
            if row:
                g = _content(row)
                if g > 1:
                    row = {c: v // g for c, v in row.items()}
    return rank


def correspondence_search(DX, DY, threshold):
    """Find a correspondence whose pairs are pairwise within ``threshold``.

    ``DX`` and ``DY`` are integer distance matrices on a common scale.  Two pairs
    (x, y), (x', y') are compatible when ``|DX[x][x'] - DY[y][y']| <= threshold``.
    Returns a list of pairs covering both sides, or None.
    """
    nx, ny = len(DX), len(DY)

    def ok(x, y, chosen):
        for (a, b) in chosen:
            if abs(DX[x][a] - DY[y][b]) > threshold:
                return False
        return True

    chosen = []

    def cover_y(j, covered):
        while j < ny and covered[j]:
            j += 1
        if j == ny:
            return True
        for x in range(nx):
            if ok(x, j, chosen):
                chosen.append((x, j))
                covered[j] = True
                if cover_y(j + 1, covered):
                    return True
                covered[j] = False
                chosen.pop()
        return False

    def assign_x(i, covered):
        if i == nx:
            return cover_y(0, covered[:])
        for y in range(ny):
            if ok(i, y, chosen):
                chosen.append((i, y))
                was = covered[y]
                covered[y] = True
                if assign_x(i + 1, covered):
                    return True
                covered[y] = was
                chosen.pop()
        return False

    if assign_x(0, [False] * ny):
        return sorted(set(chosen))
    return None


def _dil(D_src, D_tgt, f):
    """Dilatation of f as an integer pair (num, den); (0, 1) when undefined."""
    n = len(f)
    num, den = 0, 1
    for a in range(n):
        for b in range(a + 1, n):
            t = D_tgt[f[a]][f[b]]
            s = D_src[a][b]
            if t * den > num * s:
                num, den = t, s
    return num, den


def _log_term(num, den):
    return math.log(num / den) if num > den else 0.0


def best_map_pair(DX, DY, scale):
    """Exhaustive minimisation of the Lipschitz-distance objective.

    Returns ``(value, phi, psi)`` with phi: X -> Y and psi: Y -> X as tuples.
    The objective is ``(logterm(phi) + logterm(psi)) + (dispX + dispY) / scale``
    evaluated in that order so both backends produce identical floats.
    """
    nx, ny = len(DX), len(DY)
    phis = list(product(range(ny), repeat=nx))
    psis = list(product(range(nx), repeat=ny))
    lphi = [_log_term(*_dil(DX, DY, f)) for f in phis]
    lpsi = [_log_term(*_dil(DY, DX, g)) for g in psis]
    best = math.inf
    arg = (0, 0)
    for i, f in enumerate(phis):
        for j, g in enumerate(psis):
            dx = 0
            for x in range(nx):
                v = DX[g[f[x]]][x]
                if v > dx:
                    dx = v
            dy = 0
            for y in range(ny):
                v = DY[f[g[y]]][y]
                if v > dy:
                    dy = v
            val = (lphi[i] + lpsi[j]) + (dx + dy) / scale
            if val < best:
                best = val
                arg = (i, j)
    return best, phis[arg[0]], psis[arg[1]]


def best_bijection(DX, DY):
    """Minimise ``logterm(dil f) + logterm(dil f^-1)`` over bijections f: X -> Y."""
    from itertools import permutations

    n = len(DX)
    best = math.inf
    arg = tuple(range(n))
    inv = [0] * n
    for f in permutations(range(n)):
        for i, y in enumerate(f):
            inv[y] = i
        val = _log_term(*_dil(DX, DY, f)) + _log_term(*_dil(DY, DX, inv))
        if val < best:
            best = val
            arg = f
    return best, arg
