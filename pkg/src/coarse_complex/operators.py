"""Vicinal, local and nearly-local operators between chain spaces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import scipy.sparse.linalg as spla

from .chains import CellOperator
from .complex import AbsoluteComplex, ComplexError, perm_sign, vkey

LOCALITY_CELL_BUDGET = 2000
LOCALITY_STEP_BUDGET = 500_000


class LocalityBudgetError(ComplexError):
    pass


def vicinality(T: CellOperator, cap: int | None = None) -> int | None:
    """Smallest N bounding the nonzero count of every row and every column.

    Returns None when N exceeds ``cap``.
    """
    if T.nnz == 0:
        return 0
    n = int(max(T.row_counts().max(), T.col_counts().max()))
    if cap is not None and n > cap:
        return None
    return n


def norm_bound_vicinal(T: CellOperator, p: float = 2.0, cap: int | None = None) -> float | None:
    """Schur-test bound N * M, valid for every 1 <= p <= inf (possibly loose)."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    n = vicinality(T, cap)
    if n is None:
        return None
    return float(n * abs(T.max_abs()))


def operator_norm(T: CellOperator, p: float = 2.0) -> float:
    """Induced l_p operator norm for p in {1, 2, inf}."""
    if T.nnz == 0:
        return 0.0
    A = T.to_scipy()
    if p == 1:
        return float(abs(A).sum(axis=0).max())
    if math.isinf(p):
        return float(abs(A).sum(axis=1).max())
    if p == 2:
        if min(A.shape) <= 2000:
            return float(np.linalg.norm(A.toarray(), 2))
        return float(spla.svds(A, k=1, return_singular_vectors=False, random_state=0)[0])
    raise ValueError("operator_norm supports p in {1, 2, inf}")


# ---------------------------------------------------------------------------
# locality


@dataclass
class LocalityReport:
    vicinality: int | None = None
    entry_bound: float | None = None
    local_radius: int | None = None
    nearly_local_constant: float | None = None
    norm_bound: float | None = None
    conditions: dict = field(default_factory=dict)
    violation: dict | None = None
    complete: bool = True

    @property
    def is_local(self) -> bool:
        return self.local_radius is not None

    @property
    def status(self) -> str:
        return "complete" if self.complete else "checked up to budget"


class _Simplicial:
    """Vertex-set view of a simplicial complex, for neighbourhood searches."""

    def __init__(self, K: AbsoluteComplex):
        if not K.is_simplicial:
            raise ComplexError("locality checks need simplicial complexes")
        self.K = K
        self.vset = {c: frozenset(K.verts[c]) for c in K.cells()}
        self.by_set = {s: c for c, s in self.vset.items()}
        self.star: dict = {}
        for c, s in self.vset.items():
            for v in s:
                self.star.setdefault(v, set()).add(c)

    def closure(self, cells) -> set:
        return self.K.closure(cells)

    def grow(self, cells: set) -> set:
        out = set()
        for c in cells:
            for v in self.vset[c]:
                out |= self.star[v]
        return self.closure(out)

    def neighbourhood(self, cell: str, n: int) -> set:
        nb = {cell}
        for _ in range(n):
            nb = self.grow(nb)
        return nb


class _Budget:
    def __init__(self, steps: int):
        self.left = steps
        self.exhausted = False

    def tick(self) -> bool:
        self.left -= 1
        if self.left < 0:
            self.exhausted = True
        return not self.exhausted


def _isomorphisms(A: set, B: set, must: tuple | None, budget: _Budget,
                  chain_check=None) -> Iterator[dict]:
    """Vertex bijections mapping the closed set system A onto B.

    ``A``/``B`` are sets of vertex frozensets closed under faces.  ``must`` is
    an optional pair (a, b) of vertex sets with a mapped onto b.
    ``chain_check(mapping, cell)`` vetoes a map once ``cell`` is fully assigned.
    """
    va = sorted({v for s in A for v in s}, key=vkey)
    vb = sorted({v for s in B for v in s}, key=vkey)
    if len(va) != len(vb) or len(A) != len(B):
        return
    dims_a = sorted(len(s) for s in A)
    if dims_a != sorted(len(s) for s in B):
        return

    def signature(S, v):
        counts = {}
        for s in S:
            if v in s:
                counts[len(s)] = counts.get(len(s), 0) + 1
        return tuple(sorted(counts.items()))

    sig_a = {v: signature(A, v) for v in va}
    sig_b = {v: signature(B, v) for v in vb}
    # order: pinned vertices first, then by adjacency to earlier ones
    first = sorted(must[0], key=vkey) if must else []
    order = list(first)
    adj = {v: set() for v in va}
    for s in A:
        if len(s) == 2:
            a, b = tuple(s)
            adj[a].add(b)
            adj[b].add(a)
    rest = [v for v in va if v not in set(order)]
    while rest:
        placed = set(order)
        nxt = max(rest, key=lambda v: (len(adj[v] & placed), -va.index(v)))
        order.append(nxt)
        rest.remove(nxt)
    # cells of A become checkable once their last vertex (in order) is placed
    rank = {v: i for i, v in enumerate(order)}
    ready = {v: [] for v in order}
    for s in A:
        ready[max(s, key=lambda v: rank[v])].append(s)
    pinned_b = set(must[1]) if must else None
    mapping: dict = {}
    used: set = set()

    def extend(i):
        if not budget.tick():
            return
        if i == len(order):
            yield dict(mapping)
            return
        a = order[i]
        for b in vb:
            if b in used or sig_b[b] != sig_a[a]:
                continue
            if pinned_b is not None and (a in must[0]) != (b in pinned_b):
                continue
            mapping[a] = b
            ok = True
            for s in ready[a]:
                img = frozenset(mapping[v] for v in s)
                if img not in B or (chain_check is not None and not chain_check(mapping, s)):
                    ok = False
                    break
            if ok:
                used.add(b)
                yield from extend(i + 1)
                used.discard(b)
            del mapping[a]
            if budget.exhausted:
                return

    yield from extend(0)


def _orient_sign(K: AbsoluteComplex, src_verts: tuple, mapping: dict) -> tuple[frozenset, int]:
    img = [mapping[v] for v in src_verts]
    return frozenset(img), perm_sign([vkey(v) for v in img])


def _norm(vals) -> float:
    return math.sqrt(sum(float(v) ** 2 for v in vals))


def classify_locality(T: CellOperator, K_src: AbsoluteComplex, K_tgt: AbsoluteComplex,
                      radius: int = 1, cap: int | None = None,
                      step_budget: int = LOCALITY_STEP_BUDGET) -> LocalityReport:
    """Vicinality, locality radius (searched from 0 up to ``radius``) and nearly-local constant.

    N^0(s) = {s}, N^{k+1} = N(N^k) with N the closed union of vertex stars.
    When source and target complexes coincide the image of s must also lie
    inside N^k(s).
    """
    if len(K_src) + (0 if K_tgt is K_src else len(K_tgt)) > LOCALITY_CELL_BUDGET:
        raise LocalityBudgetError("locality check too large")
    src = _Simplicial(K_src)
    tgt = src if K_tgt is K_src else _Simplicial(K_tgt)
    same = K_tgt is K_src or set(K_src.cells()) == set(K_tgt.cells())
    if tuple(T.cols) != tuple(K_src.cells(T.source_degree)) or any(r not in K_tgt for r in T.rows):
        raise ComplexError("operator bases do not match the complexes")

    report = LocalityReport()
    report.vicinality = vicinality(T, cap)
    report.entry_bound = float(abs(T.max_abs()))
    if report.vicinality is not None:
        report.norm_bound = float(report.vicinality * report.entry_bound)
    report.conditions["1"] = report.conditions["2"] = report.vicinality is not None

    budget = _Budget(step_budget)
    cols = [T.column(j) for j in range(len(T.cols))]
    col_of = {c: j for j, c in enumerate(T.cols)}

    # nearly local: compare norms inside neighbourhood-isomorphism classes
    best_c = None
    for n in range(radius + 1):
        verdict, witness, c_val = _check_radius(T, src, tgt, same, n, cols, col_of, budget)
        if best_c is None or (c_val is not None and c_val < best_c):
            best_c = c_val
        if verdict:
            report.local_radius = n
            report.nearly_local_constant = c_val
            report.violation = None
            break
        report.violation = witness
        if budget.exhausted:
            break
    else:
        report.nearly_local_constant = best_c
    if report.vicinality is None:
        report.nearly_local_constant = None
        report.local_radius = None
    report.conditions["3"] = report.local_radius is not None
    report.complete = not budget.exhausted
    return report


def _check_radius(T, src: _Simplicial, tgt: _Simplicial, same: bool, n: int, cols, col_of, budget):
    K = src.K
    q = T.source_degree
    cells = K.cells(q)
    nbhd = {s: src.neighbourhood(s, n) for s in cells}
    closed = {s: src.closure(nbhd[s]) for s in cells}
    if same:
        for s in cells:
            out = [c for c in cols[col_of[s]] if c not in nbhd[s]]
            if out:
                return False, {"cell": s, "reason": f"image leaves N^{n}", "outside": sorted(out)[:5]}, None

    def system(cellset):
        return {src.vset[c] for c in cellset}

    # group cells by a cheap invariant, then split into isomorphism classes
    def invariant(s):
        fv = {}
        for c in nbhd[s]:
            fv[K.dim(c)] = fv.get(K.dim(c), 0) + 1
        return tuple(sorted(fv.items())), len(closed[s])

    groups: dict = {}
    for s in cells:
        groups.setdefault(invariant(s), []).append(s)

    worst_c = 1.0
    violation = None
    local = True
    for members in groups.values():
        classes: list[list] = []
        for s in members:
            A_s = system(closed[s])
            for cls in classes:
                rep = cls[0]
                found = next(
                    _isomorphisms(system(closed[rep]), A_s, (src.vset[rep], src.vset[s]), budget,
                                  _cell_filter(src, nbhd[rep], nbhd[s])),
                    None,
                )
                if found is not None:
                    cls.append(s)
                    break
            else:
                classes.append([s])
        for cls in classes:
            norms = [_norm(cols[col_of[s]].values()) for s in cls]
            lo, hi = min(norms), max(norms)
            if hi > 0:
                worst_c = max(worst_c, math.inf if lo == 0 else hi / lo)
            if not local:
                continue
            rep = cls[0]
            for s in cls:
                bad = _transport_fails(T, src, tgt, rep, s, nbhd, closed, cols, col_of, budget)
                if bad is not None:
                    local = False
                    violation = {"cell": rep, "other": s, "radius": n, "reason": bad}
                    break
                if budget.exhausted:
                    break
    c_val = None if math.isinf(worst_c) else worst_c
    return local and not budget.exhausted, violation, c_val


def _cell_filter(src: _Simplicial, cells_a: set, cells_b: set):
    """Veto maps that send a neighbourhood cell outside the other neighbourhood."""
    set_b = {src.vset[c] for c in cells_b}
    set_a = {src.vset[c] for c in cells_a}

    def check(mapping, s):
        if s not in set_a:
            return True
        return frozenset(mapping[v] for v in s) in set_b

    return check


def _image_system(tgt: _Simplicial, cols, col_of, cellset, q, K_src) -> set:
    support = set()
    for c in cellset:
        if K_src.dim(c) == q:
            support.update(cols[col_of[c]])
    return {tgt.vset[c] for c in tgt.closure(support)}


def _transport_fails(T, src, tgt, rep, s, nbhd, closed, cols, col_of, budget) -> str | None:
    """None if every eta: N^n(rep) -> N^n(s) has a matching epsilon on the images."""
    q = T.source_degree
    K = src.K
    A = {src.vset[c] for c in closed[rep]}
    B = {src.vset[c] for c in closed[s]}
    img_a = _image_system(tgt, cols, col_of, nbhd[rep], q, K)
    img_b = _image_system(tgt, cols, col_of, nbhd[s], q, K)
    chain_a = {tgt.vset[c]: v for c, v in cols[col_of[rep]].items()}
    chain_b = {tgt.vset[c]: v for c, v in cols[col_of[s]].items()}
    verts_a = {tgt.vset[c]: tgt.K.verts[c] for c in cols[col_of[rep]]}
    any_eta = False
    for eta in _isomorphisms(A, B, (src.vset[rep], src.vset[s]), budget, _cell_filter(src, nbhd[rep], nbhd[s])):
        any_eta = True
        _img, sign = _orient_sign(K, K.verts[rep], eta)

        def chain_ok(mapping, cell, sign=sign):
            if cell not in chain_a:
                return frozenset(mapping[v] for v in cell) not in chain_b
            img, o = _orient_sign(tgt.K, verts_a[cell], mapping)
            return chain_b.get(img, 0) == sign * o * chain_a[cell]

        if next(_isomorphisms(img_a, img_b, None, budget, chain_ok), None) is None:
            if budget.exhausted:
                return None
            return "no simplicial bijection of the images transports the chain"
        if budget.exhausted:
            return None
    if not any_eta:  # pragma: no cover - classes are built from existing maps
        return "neighbourhoods not isomorphic"
    return None
