"""Absolute complexes: cells, face relation and integer incidence numbers.

Simplicial complexes (and the Delta-complexes produced by gluing) additionally
carry an ordered vertex tuple per cell and face maps, which the cup and cap
products need.  Block complexes carry only incidence data.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .chains import CellOperator


class ComplexError(ValueError):
    pass


def vkey(v):
    """Sort key giving a total order on mixed int/str vertex labels."""
    return (0, v, "") if isinstance(v, int) else (1, 0, str(v))


def simplex_id(verts: Sequence) -> str:
    return ",".join(str(v) for v in verts)


def perm_sign(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq`` (entries distinct)."""
    s = list(seq)
    sign = 1
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[j] < s[i]:
                sign = -sign
    return sign


class AbsoluteComplex:
    """Cells with dimensions, a face relation ``<`` and incidence numbers.

    Parameters
    ----------
    cells
        Iterable of ``(id, dim)``; the order fixes the basis order per degree.
    incidence
        Mapping ``(face_id, coface_id) -> int``.
    covers
        Extra pairs ``(x, y)`` with ``x < y`` beyond the incidence support.
    verts, faces
        Optional vertex tuples and face maps (``faces[c][i]`` omits vertex ``i``).
    """

    def __init__(
        self,
        cells: Iterable[tuple[str, int]],
        incidence: Mapping[tuple[str, str], int],
        covers: Iterable[tuple[str, str]] = (),
        verts: Mapping[str, tuple] | None = None,
        faces: Mapping[str, tuple] | None = None,
        name: str = "",
    ):
        self.name = name
        self._dim: dict[str, int] = {}
        by_dim: dict[int, list[str]] = {}
        for cid, d in cells:
            cid = str(cid)
            if cid in self._dim:
                raise ComplexError(f"duplicate cell id {cid!r}")
            if d < 0:
                raise ComplexError(f"negative dimension for cell {cid!r}")
            self._dim[cid] = int(d)
            by_dim.setdefault(int(d), []).append(cid)
        self._by_dim = {d: tuple(v) for d, v in by_dim.items()}
        self._pos = {d: {c: i for i, c in enumerate(v)} for d, v in self._by_dim.items()}
        self.incidence: dict[tuple[str, str], int] = {}
        self._faces_of: dict[str, dict[str, int]] = {c: {} for c in self._dim}
        self._cofaces_of: dict[str, dict[str, int]] = {c: {} for c in self._dim}
        for (x, y), e in incidence.items():
            if x not in self._dim or y not in self._dim:
                missing = x if x not in self._dim else y
                raise ComplexError(f"incidence references unknown cell {missing!r}")
            e = int(e)
            if e == 0:
                continue
            self.incidence[(x, y)] = e
            self._faces_of[y][x] = e
            self._cofaces_of[x][y] = e
        self._covers: dict[str, set[str]] = {c: set(self._faces_of[c]) for c in self._dim}
        for x, y in covers:
            if x not in self._dim or y not in self._dim:
                raise ComplexError(f"face relation references unknown cell ({x!r}, {y!r})")
            self._covers[y].add(x)
        self._above: dict[str, set[str]] = {c: set() for c in self._dim}
        for y, xs in self._covers.items():
            for x in xs:
                self._above[x].add(y)
        self.verts = dict(verts) if verts is not None else None
        self.faces = dict(faces) if faces is not None else None
        self._below_cache: dict[str, frozenset] = {}

    # -- queries -------------------------------------------------------------
    @property
    def dimension(self) -> int:
        return max(self._by_dim, default=-1)

    def dim(self, cid: str) -> int:
        return self._dim[cid]

    def __contains__(self, cid) -> bool:
        return cid in self._dim

    def __len__(self) -> int:
        return len(self._dim)

    def cells(self, q: int | None = None) -> tuple[str, ...]:
        if q is None:
            return tuple(c for d in sorted(self._by_dim) for c in self._by_dim[d])
        return self._by_dim.get(q, ())

    def index(self, q: int) -> dict[str, int]:
        return self._pos.get(q, {})

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self._by_dim.get(d, ())) for d in range(self.dimension + 1))

    def faces_of(self, cid: str) -> dict[str, int]:
        """Codimension-one faces with nonzero incidence."""
        return self._faces_of[cid]

    def cofaces_of(self, cid: str) -> dict[str, int]:
        return self._cofaces_of[cid]

    def eps(self, x: str, y: str) -> int:
        return self.incidence.get((x, y), 0)

    def below(self, cid: str) -> frozenset:
        """All cells strictly below ``cid`` in the transitive face relation."""
        hit = self._below_cache.get(cid)
        if hit is not None:
            return hit
        out: set[str] = set()
        stack = list(self._covers[cid])
        while stack:
            c = stack.pop()
            if c in out:
                continue
            out.add(c)
            stack.extend(self._covers[c])
        res = frozenset(out)
        self._below_cache[cid] = res
        return res

    def less(self, x: str, y: str) -> bool:
        return x in self.below(y)

    def closure(self, ids: Iterable[str]) -> set[str]:
        out = set()
        for c in ids:
            out.add(c)
            out |= self.below(c)
        return out

    @property
    def has_vertices(self) -> bool:
        return self.verts is not None and self.faces is not None

    @property
    def is_simplicial(self) -> bool:
        if not self.has_vertices:
            return False
        seen = set()
        for c in self._dim:
            key = frozenset(self.verts[c])
            if key in seen:
                return False
            seen.add(key)
        return True

    def vertex_labels(self) -> list:
        if not self.has_vertices:
            raise ComplexError("complex has no vertex data")
        return [self.verts[c][0] for c in self.cells(0)]

    def cell_of_vertices(self) -> dict:
        """Map ``frozenset(vertices) -> cell id`` (simplicial complexes only)."""
        if not self.is_simplicial:
            raise ComplexError("vertex sets do not determine cells")
        return {frozenset(self.verts[c]): c for c in self._dim}

    def covers_of(self, cid: str) -> set[str]:
        """Cells covering ``cid`` in the face relation (any incidence)."""
        return self._above[cid]

    def is_pure(self) -> bool:
        return len(self.closure(self.cells(self.dimension))) == len(self._dim)

    # -- operators -------------------------------------------------------------
    def boundary_matrix(self, q: int) -> CellOperator:
        """Matrix of the boundary from degree ``q + 1`` to degree ``q``."""
        rows = self.cells(q)
        cols = self.cells(q + 1)
        rpos = self.index(q)
        entries = {}
        for j, y in enumerate(cols):
            for x, e in self._faces_of[y].items():
                if self._dim[x] == q:
                    entries[(rpos[x], j)] = e
        return CellOperator(q + 1, q, rows, cols, entries)

    def relabeled(self, mapping: Mapping[str, str], name: str | None = None) -> "AbsoluteComplex":
        """Same complex with cell ids renamed; the basis order is preserved."""
        cells = [(mapping[c], self._dim[c]) for c in self.cells()]
        inc = {(mapping[x], mapping[y]): e for (x, y), e in self.incidence.items()}
        covers = [(mapping[x], mapping[y]) for y, xs in self._covers.items() for x in xs]
        verts = {mapping[c]: v for c, v in self.verts.items()} if self.verts else None
        faces = (
            {mapping[c]: tuple(mapping[f] for f in fs) for c, fs in self.faces.items()}
            if self.faces
            else None
        )
        return AbsoluteComplex(cells, inc, covers, verts, faces, name or self.name)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"AbsoluteComplex{label}(f={self.f_vector()})"


# --------------------------------------------------------------------------
# simplicial construction


def build_simplicial(facets: Iterable[Sequence], name: str = "") -> AbsoluteComplex:
    """Simplicial complex generated by ``facets``.

    Each simplex is oriented by ascending vertex order; the incidence of the
    face omitting the i-th vertex is ``(-1)**i``.
    """
    simplices: set[tuple] = set()
    for facet in facets:
        facet = list(facet)
        if not facet:
            raise ComplexError("empty facet")
        if len(set(facet)) != len(facet):
            raise ComplexError(f"duplicate vertex in facet {facet}")
        top = tuple(sorted(facet, key=vkey))
        for k in range(1, len(top) + 1):
            simplices.update(combinations(top, k))
    return _from_simplices(simplices, name)


def _from_simplices(simplices: Iterable[tuple], name: str = "") -> AbsoluteComplex:
    ordered = sorted(simplices, key=lambda s: (len(s), [vkey(v) for v in s]))
    cells = [(simplex_id(s), len(s) - 1) for s in ordered]
    verts = {simplex_id(s): s for s in ordered}
    faces = {}
    inc = {}
    for s in ordered:
        sid = simplex_id(s)
        if len(s) == 1:
            faces[sid] = ()
            continue
        fs = []
        for i in range(len(s)):
            fid = simplex_id(s[:i] + s[i + 1:])
            fs.append(fid)
            inc[(fid, sid)] = -1 if i % 2 else 1
        faces[sid] = tuple(fs)
    return AbsoluteComplex(cells, inc, (), verts, faces, name)


def delta_complex(
    cells: Sequence[tuple[str, tuple]],
    faces: Mapping[str, tuple],
    name: str = "",
) -> AbsoluteComplex:
    """Delta-complex from ordered vertex tuples and explicit face maps."""
    inc = {}
    verts = {}
    for cid, vs in cells:
        verts[cid] = tuple(vs)
        for i, f in enumerate(faces[cid]):
            inc[(f, cid)] = inc.get((f, cid), 0) + (-1 if i % 2 else 1)
    return AbsoluteComplex(
        [(c, len(v) - 1) for c, v in cells], inc, (), verts, dict(faces), name
    )


# --------------------------------------------------------------------------
# validation


@dataclass
class IncidenceReport:
    passed: bool
    failures: list = field(default_factory=list)
    checked_pairs: int = 0
    order_violations: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def validate_incidence(K: AbsoluteComplex) -> IncidenceReport:
    """Check the codimension-two vanishing condition and the order axioms.

    Every ``(x, y)`` with ``dim y = dim x + 2`` reachable through incidences is
    checked; failures list ``(x, y, sum)``.
    """
    failures = []
    order_bad = []
    checked = 0
    for (x, y), e in K.incidence.items():
        if K.dim(y) != K.dim(x) + 1:
            order_bad.append((x, y, "dimension jump"))
    for y in K.cells():
        for x in K._covers[y]:
            if K.dim(x) >= K.dim(y):
                order_bad.append((x, y, "dim not monotone"))
    for y in K.cells():
        sums: dict[str, int] = {}
        for z, e_zy in K.faces_of(y).items():
            for x, e_xz in K.faces_of(z).items():
                sums[x] = sums.get(x, 0) + e_xz * e_zy
        checked += len(sums)
        for x in sorted(sums):
            if sums[x] != 0:
                failures.append((x, y, sums[x]))
    return IncidenceReport(not failures and not order_bad, failures, checked, order_bad)


def ulf_degree(K: AbsoluteComplex, q: int) -> int:
    """Largest number of (q+1)-cofaces of a q-cell (0 when there are none)."""
    return max(
        (sum(1 for y in K.covers_of(c) if K.dim(y) == q + 1) for c in K.cells(q)),
        default=0,
    )
