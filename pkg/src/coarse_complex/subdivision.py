"""Subdivisions of bounded degree, block complexes, Theta and vertex translations.

Given a simplicial complex K and a subdivision K', every cell s of K has a
block B(s): the cells of K' lying in s.  An oriented block is a chain
b = sum(g_i s'_i) on the top cells of B(s) with g_i = +-1; Theta sends s to b.
A vertex translation eta sends each vertex of K' to a vertex of its carrier.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from . import exact
from .chains import CellOperator, SparseChain
from .complex import AbsoluteComplex, ComplexError, build_simplicial, perm_sign, validate_incidence, vkey
from .hodge import betti


@dataclass
class SubdivisionPair:
    """K, a subdivision K' and the carrier map K'-cells -> K-cells."""

    K: AbsoluteComplex
    K_sub: AbsoluteComplex
    carrier: dict
    degree_bounds: dict
    kind: str = "general"
    vertex_carrier: dict = field(default_factory=dict)

    def carried(self, cell: str) -> list:
        """Cells of K' carried by ``cell`` (its open block)."""
        fibres = self.__dict__.get("_fibres")
        if fibres is None:
            fibres = {}
            for c in self.K_sub.cells():
                fibres.setdefault(self.carrier[c], []).append(c)
            self.__dict__["_fibres"] = fibres
        return fibres.get(cell, [])

    def validate(self) -> list[str]:
        problems = []
        K, Ks = self.K, self.K_sub
        for c in Ks.cells():
            t = self.carrier.get(c)
            if t is None or t not in K:
                problems.append(f"cell {c!r} has no carrier")
                continue
            if K.dim(t) < Ks.dim(c):
                problems.append(f"carrier of {c!r} has lower dimension")
            for f in Ks.faces_of(c):
                tf = self.carrier[f]
                if tf != t and not K.less(tf, t):
                    problems.append(f"carrier of face {f!r} is not a face of the carrier of {c!r}")
        counts: dict = {}
        for c in Ks.cells():
            t = self.carrier.get(c)
            if t is not None and Ks.dim(c) == K.dim(t):
                counts[t] = counts.get(t, 0) + 1
        for t, n in counts.items():
            if n > self.degree_bounds.get(K.dim(t), n):
                problems.append(f"cell {t!r} is split into {n} cells, above m_{K.dim(t)}")
        return problems


def barycentric_subdivide(K: AbsoluteComplex) -> SubdivisionPair:
    """Barycentric subdivision; vertex labels are K-cell positions, so lower dimension first."""
    if not K.is_simplicial:
        raise ComplexError("barycentric subdivision needs a simplicial complex")
    cells = K.cells()
    label = {c: i for i, c in enumerate(cells)}
    flags = []
    # maximal flags s_0 < s_1 < ... < s_k ending at every cell (all chains come as faces)
    def extend(chain):
        last = chain[-1]
        faces = [f for f in K.faces_of(last)]
        if not faces:
            flags.append([label[c] for c in reversed(chain)])
            return
        for f in faces:
            extend(chain + [f])

    for top in cells:
        if not K.covers_of(top):
            extend([top])
    Ks = build_simplicial(flags, name=f"sd({K.name})" if K.name else "sd")
    carrier = {c: cells[max(Ks.verts[c])] for c in Ks.cells()}
    vertex_carrier = {i: cells[i] for i in range(len(cells))}
    bounds = {q: factorial(q + 1) for q in range(K.dimension + 1)}
    return SubdivisionPair(K, Ks, carrier, bounds, "barycentric", vertex_carrier)


def identity_subdivision(K: AbsoluteComplex) -> SubdivisionPair:
    carrier = {c: c for c in K.cells()}
    vc = {K.verts[c][0]: c for c in K.cells(0)} if K.has_vertices else {}
    return SubdivisionPair(K, K, carrier, {q: 1 for q in range(K.dimension + 1)}, "identity", vc)


# ---------------------------------------------------------------------------
# blocks


@dataclass
class BlockComplex:
    complex: AbsoluteComplex
    zeta: dict
    chains: dict
    relative_ranks: dict = field(default_factory=dict)

    def block(self, cell: str) -> SparseChain:
        return self.chains[self.zeta[cell]]


def block_id(cell: str) -> str:
    return f"B[{cell}]"


def block_relative_rank(S: SubdivisionPair, cell: str) -> int:
    """dim H_q(B, dB) for the block of a q-cell: top-degree relative cycles."""
    Ks = S.K_sub
    q = S.K.dim(cell)
    inner = set(S.carried(cell))
    top = [c for c in Ks.cells(q) if c in inner]
    if q == 0:
        return len(top)
    lower = {c: i for i, c in enumerate(c for c in Ks.cells(q - 1) if c in inner)}
    cols = [{lower[f]: e for f, e in Ks.faces_of(c).items() if f in lower} for c in top]
    return len(top) - exact.sparse_rank(cols, len(lower))


def _orient_block(S: SubdivisionPair, cell: str, target: dict) -> dict:
    """Signs g on the top cells of B(cell) with boundary equal to ``target``.

    Sign propagation: a face on the block boundary fixes its coface's sign from
    ``target``; an interior face is shared by two top cells whose signs must
    cancel on it.
    """
    Ks = S.K_sub
    q = S.K.dim(cell)
    top = [c for c in S.carried(cell) if Ks.dim(c) == q]
    if q == 0:
        return {top[0]: 1}
    top_set = set(top)
    inner_faces: dict = {}
    for c in top:
        for f in Ks.faces_of(c):
            if S.carrier[f] == cell:
                inner_faces.setdefault(f, []).append(c)
    sign: dict = {}
    queue = []
    for c in top:
        for f, e in Ks.faces_of(c).items():
            if S.carrier[f] != cell and target.get(f):
                sign[c] = target[f] * e
                break
        if c in sign:
            queue.append(c)
            break
    if not queue:
        sign[top[0]] = 1
        queue.append(top[0])
    while queue:
        c = queue.pop()
        for f, e in Ks.faces_of(c).items():
            for other in inner_faces.get(f, ()):
                if other == c or other not in top_set:
                    continue
                want = -sign[c] * e * Ks.eps(f, other)
                if other not in sign:
                    sign[other] = want
                    queue.append(other)
    return sign


def block_complex(S: SubdivisionPair) -> BlockComplex:
    """Oriented blocks, built from the vertices upward.

    Each block chain b(s) is solved so that del' b(s) = sum [s:v] b(v); the
    incidences of the resulting cell complex are then read back off the chains.
    """
    K, Ks = S.K, S.K_sub
    chains: dict = {}
    ranks: dict = {}
    for cell in K.cells():
        q = K.dim(cell)
        r = block_relative_rank(S, cell)
        ranks[cell] = r
        if r != 1:
            raise ComplexError(f"block of {cell!r} has relative homology rank {r}, expected 1")
        target: dict = {}
        for face, e in K.faces_of(cell).items():
            for c, g in chains[face].coeffs.items():
                target[c] = target.get(c, 0) + e * g
        signs = _orient_block(S, cell, target)
        chains[cell] = SparseChain(q, signs)
    # read incidences back: del' b(s) decomposed over the blocks of the faces
    home = {}
    for cell, ch in chains.items():
        for c in ch.coeffs:
            home[c] = cell
    inc: dict = {}
    covers = []
    for cell in K.cells():
        bd: dict = {}
        for c, g in chains[cell].coeffs.items():
            for f, e in Ks.faces_of(c).items():
                bd[f] = bd.get(f, 0) + g * e
        bd = {f: v for f, v in bd.items() if v}
        per_block: dict = {}
        seen: dict = {}
        for f, v in bd.items():
            owner = home.get(f)
            if owner is None or owner == cell:
                raise ComplexError(f"boundary of block {cell!r} leaves the lower blocks")
            per_block.setdefault(owner, set()).add(v * chains[owner][f])
            seen[owner] = seen.get(owner, 0) + 1
        for owner, vals in per_block.items():
            if len(vals) != 1 or seen[owner] != len(chains[owner].coeffs):
                raise ComplexError(f"boundary of block {cell!r} is not a combination of blocks")
            inc[(block_id(owner), block_id(cell))] = vals.pop()
        for f in K.below(cell):
            covers.append((block_id(f), block_id(cell)))
    Z = AbsoluteComplex(
        [(block_id(c), K.dim(c)) for c in K.cells()], inc, covers, name=f"Z({Ks.name})"
    )
    zeta = {c: block_id(c) for c in K.cells()}
    return BlockComplex(Z, zeta, {block_id(c): ch for c, ch in chains.items()}, ranks)


def zeta_is_isomorphism(S: SubdivisionPair, B: BlockComplex) -> bool:
    K, Z = S.K, B.complex
    if sorted(B.zeta.values()) != sorted(Z.cells()):
        return False
    if any(K.dim(c) != Z.dim(b) for c, b in B.zeta.items()):
        return False
    mapped = {(B.zeta[x], B.zeta[y]): e for (x, y), e in K.incidence.items()}
    return mapped == Z.incidence and validate_incidence(Z).passed


# ---------------------------------------------------------------------------
# Theta and eta


def theta_chain_map(S: SubdivisionPair, B: BlockComplex, p: float = 2.0) -> dict[int, CellOperator]:
    """Theta_q: C_q(K) -> C_q(K'), sending each cell to its oriented block."""
    K, Ks = S.K, S.K_sub
    out = {}
    for q in range(K.dimension + 1):
        cols = {c: B.block(c).coeffs for c in K.cells(q)}
        op = CellOperator.from_columns(q, q, Ks.cells(q), K.cells(q), cols)
        op.vicinality = None
        out[q] = op
    return out


@dataclass
class VertexTranslation:
    vertex_map: dict
    chain_maps: dict


def vertex_translation(S: SubdivisionPair) -> VertexTranslation:
    """eta(v') = lowest vertex of the carrier of v'; degenerate images give 0."""
    K, Ks = S.K, S.K_sub
    if not K.has_vertices or not Ks.has_vertices:
        raise ComplexError("vertex translation needs vertex data on both complexes")
    by_set = K.cell_of_vertices()
    vmap = {}
    for c in Ks.cells(0):
        v = Ks.verts[c][0]
        car = S.carrier[c]
        vmap[v] = min(K.verts[car], key=vkey)
    maps = {}
    for q in range(Ks.dimension + 1):
        cols = {}
        for c in Ks.cells(q):
            img = [vmap[v] for v in Ks.verts[c]]
            if len(set(img)) < len(img):
                continue
            target = by_set.get(frozenset(img))
            if target is None:
                raise ComplexError(f"image of {c!r} is not a simplex of K")
            cols[c] = {target: perm_sign([vkey(v) for v in img])}
        maps[q] = CellOperator.from_columns(q, q, K.cells(q), Ks.cells(q), cols)
    return VertexTranslation(vmap, maps)


def chain_map_residual(phi: dict, bd_src, bd_tgt) -> dict[int, CellOperator]:
    """del phi_q - phi_{q-1} del for every q >= 1 (``bd_*`` map q -> boundary matrix q-1)."""
    out = {}
    for q in sorted(phi):
        if q == 0 or q - 1 not in phi:
            continue
        out[q] = bd_tgt(q - 1) @ phi[q] - phi[q - 1] @ bd_src(q - 1)
    return out


# ---------------------------------------------------------------------------
# checks


def _cycle_basis(K: AbsoluteComplex, q: int) -> list[dict]:
    """Integer basis of Z_q(K) as {cell: coeff} dicts."""
    cells = K.cells(q)
    if q == 0:
        return [{c: 1} for c in cells]
    M = K.boundary_matrix(q - 1).to_fraction_rows()
    basis = exact.nullspace(M, len(cells)) if M else exact.nullspace([], len(cells))
    return [
        {cells[i]: v for i, v in enumerate(exact.clear_denominators(vec)) if v}
        for vec in basis
    ]


@dataclass
class InvarianceReport:
    betti_K: tuple
    betti_sub: tuple
    betti_equal: bool
    theta_injective: dict
    theta_homology_injective: dict
    passed: bool


def subdivision_invariance_check(S: SubdivisionPair, p: float = 2.0,
                                 B: BlockComplex | None = None,
                                 theta: dict | None = None) -> InvarianceReport:
    K, Ks = S.K, S.K_sub
    B = B or block_complex(S)
    theta = theta or theta_chain_map(S, B, p)
    n = max(K.dimension, Ks.dimension)
    bK = tuple(betti(K, q, p) for q in range(n + 1))
    bS = tuple(betti(Ks, q, p) for q in range(n + 1))
    inj = {q: exact.rank(T) == len(T.cols) for q, T in theta.items()}
    hom = {}
    for q, T in theta.items():
        # Theta_* injective iff rank[B'_q | Theta Z_q] - rank B'_q = b_q(K)
        rows_idx = T.row_pos
        bnd = [
            {rows_idx[f]: e for f, e in Ks.faces_of(c).items()}
            for c in Ks.cells(q + 1)
        ]
        images = []
        for z in _cycle_basis(K, q):
            img: dict = {}
            for c, a in z.items():
                for r, v in B.block(c).coeffs.items():
                    img[rows_idx[r]] = img.get(rows_idx[r], 0) + a * v
            images.append({k: v for k, v in img.items() if v})
        nrows = len(T.rows)
        base = exact.sparse_rank(bnd, nrows)
        full = exact.sparse_rank(bnd + images, nrows)
        hom[q] = full - base == bK[q]
    ok = bK == bS and all(inj.values()) and all(hom.values())
    return InvarianceReport(bK, bS, bK == bS, inj, hom, ok)


@dataclass
class HomotopyVerdict:
    passed: bool
    verdict: str
    chain_maps: bool
    locality: dict
    residual_norms: dict
    homotopy_norms: dict
    betti_equal: bool | None = None


def chain_homotopy_check(K: AbsoluteComplex, L: AbsoluteComplex, phi: dict, psi: dict,
                         D1: dict, D2: dict, locality_radius: int | None = None) -> HomotopyVerdict:
    """Check psi phi - id = del D1 + D1 del on K and phi psi - id = del D2 + D2 del on L.

    ``phi``: C(K) -> C(L) and ``psi``: C(L) -> C(K) per degree; ``D1``, ``D2``
    raise degree by one.  (C1) is certified by vicinality and entry bounds;
    the neighbourhood-equivariance condition is reported when a radius is given.
    """
    from .operators import classify_locality, operator_norm, vicinality

    top = max(K.dimension, L.dimension)

    def get(fam, q, rows, cols, sdeg, tdeg):
        op = fam.get(q)
        return op if op is not None else CellOperator.zero(sdeg, tdeg, rows, cols)

    def bd(C, q):
        return C.boundary_matrix(q)

    res_chain = {}
    for name, fam, A, Bc in (("phi", phi, K, L), ("psi", psi, L, K)):
        for q in range(1, top + 1):
            f_q = get(fam, q, Bc.cells(q), A.cells(q), q, q)
            f_q1 = get(fam, q - 1, Bc.cells(q - 1), A.cells(q - 1), q - 1, q - 1)
            r = bd(Bc, q - 1) @ f_q - f_q1 @ bd(A, q - 1)
            res_chain[f"{name}_{q}"] = r
    chain_ok = all(r.is_zero() for r in res_chain.values())

    locality = {}
    for name, fam, A, Bc in (("phi", phi, K, L), ("psi", psi, L, K)):
        for q, op in sorted(fam.items()):
            entry = {"vicinality": vicinality(op), "entry_bound": float(abs(op.max_abs()))}
            if locality_radius is not None:
                rep = classify_locality(op, A, Bc, locality_radius)
                entry["local_radius"] = rep.local_radius
                entry["nearly_local_constant"] = rep.nearly_local_constant
            locality[f"{name}_{q}"] = entry
    c1 = all(e["vicinality"] is not None for e in locality.values())

    residual_norms = {}
    homotopy_norms = {}
    all_zero = True
    for label, f, g, C, D in (("psi_phi", phi, psi, K, D1), ("phi_psi", psi, phi, L, D2)):
        for q in range(top + 1):
            cells = C.cells(q)
            if not cells:
                continue
            other = L if C is K else K
            f_q = get(f, q, other.cells(q), cells, q, q)
            g_q = get(g, q, cells, other.cells(q), q, q)
            lhs = g_q @ f_q - CellOperator.identity(q, cells)
            Dq = get(D, q, C.cells(q + 1), cells, q, q + 1)
            Dq1 = get(D, q - 1, cells, C.cells(q - 1), q - 1, q)
            rhs = bd(C, q) @ Dq + Dq1 @ bd(C, q - 1)
            r = lhs - rhs
            residual_norms[f"{label}_{q}"] = float(abs(r.max_abs()))
            homotopy_norms[f"D_{label}_{q}"] = operator_norm(Dq, 2)
            all_zero &= r.is_zero()
    passed = chain_ok and c1 and all_zero
    if passed:
        verdict = "chain homotopy equivalence"
    elif not chain_ok:
        verdict = "not a chain map"
    elif not all_zero:
        verdict = "not a chain homotopy pair"
    else:
        verdict = "maps not vicinal"
    betti_eq = None
    if passed:
        betti_eq = all(betti(K, q) == betti(L, q) for q in range(top + 1))
    if not chain_ok:
        residual_norms.update({k: float(abs(v.max_abs())) for k, v in res_chain.items() if not v.is_zero()})
    return HomotopyVerdict(passed, verdict, chain_ok, locality, residual_norms, homotopy_norms, betti_eq)


def acyclic_carrier_homotopy(S: SubdivisionPair, theta: dict, eta: VertexTranslation) -> dict[int, CellOperator]:
    """D with Theta eta_# - id = del D + D del on K', for barycentric pairs.

    The carrier of a cell s' is sd(carrier(s')), a cone on the barycenter of
    the carrier; D is built degree by degree with the cone operator.
    """
    Ks = S.K_sub
    if S.kind == "identity":
        return {q: CellOperator.zero(q, q + 1, Ks.cells(q + 1), Ks.cells(q)) for q in range(Ks.dimension + 1)}
    if S.kind != "barycentric":
        raise ComplexError("acyclic-carrier homotopy needs a barycentric pair; supply D instead")
    by_set = Ks.cell_of_vertices()
    apex_of = {car: v for v, car in S.vertex_carrier.items()}
    D: dict = {}
    thetas = {q: theta[q].col_dicts() for q in theta}
    cols_eta = {q: {Ks.cells(q)[j]: col for j, col in enumerate(op.col_dicts())} for q, op in eta.chain_maps.items()}

    def theta_eta(q, c) -> dict:
        out: dict = {}
        T = theta[q]
        for i, a in cols_eta[q][c].items():
            k = S.K.cells(q)[i]
            for r, v in thetas[q][T.col_pos[k]].items():
                out[T.rows[r]] = out.get(T.rows[r], 0) + a * v
        return out

    def cone(chain: dict, apex, q) -> dict:
        out: dict = {}
        for s, a in chain.items():
            vs = Ks.verts[s]
            if apex in vs:
                continue
            target = by_set[frozenset(vs) | {apex}]
            # apex is the largest label inside its carrier, so it comes last
            out[target] = out.get(target, 0) + (-1) ** (q + 1) * a
        return out

    for q in range(Ks.dimension + 1):
        cols = {}
        for c in Ks.cells(q):
            chain = theta_eta(q, c)
            chain[c] = chain.get(c, 0) - 1
            for f, e in Ks.faces_of(c).items():
                for s, a in D[q - 1].get(f, {}).items():
                    chain[s] = chain.get(s, 0) - e * a
            chain = {k: v for k, v in chain.items() if v}
            cols[c] = cone(chain, apex_of[S.carrier[c]], q)
        D[q] = cols
    return {
        q: CellOperator.from_columns(q, q + 1, Ks.cells(q + 1), Ks.cells(q), D[q])
        for q in D
    }


@dataclass
class PipelineReport:
    zeta_iso: bool
    theta_chain_map: bool
    theta_mono: bool
    eta_theta_id: bool
    betti_equal: bool
    theta_homology_injective: bool
    betti_K: tuple = ()
    betti_sub: tuple = ()
    block_signs: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all((self.zeta_iso, self.theta_chain_map, self.theta_mono, self.eta_theta_id,
                    self.betti_equal, self.theta_homology_injective))


def subdivision_pipeline(K: AbsoluteComplex, S: SubdivisionPair | None = None) -> PipelineReport:
    """Barycentric pipeline end to end: zeta, Theta, eta and invariance."""
    S = S or barycentric_subdivide(K)
    B = block_complex(S)
    theta = theta_chain_map(S, B)
    eta = vertex_translation(S)
    res = chain_map_residual(theta, S.K.boundary_matrix, S.K_sub.boundary_matrix)
    chain_ok = all(r.is_zero() for r in res.values())
    ident = all(
        (eta.chain_maps[q] @ theta[q]) == CellOperator.identity(q, S.K.cells(q))
        for q in theta
    )
    inv = subdivision_invariance_check(S, B=B, theta=theta)
    signs = {c: dict(ch.coeffs) for c, ch in B.chains.items()}
    return PipelineReport(
        zeta_is_isomorphism(S, B), chain_ok, all(inv.theta_injective.values()), ident,
        inv.betti_equal, all(inv.theta_homology_injective.values()), inv.betti_K, inv.betti_sub, signs,
    )
