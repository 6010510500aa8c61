"""L_p norms, combinatorial Laplacians, harmonic cochains and spectral gaps.

Operators are assembled exactly (integer entries).  Betti numbers come from
exact ranks; spectra, harmonic bases and decompositions are floating point.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import exact
from .chains import CellOperator, SparseChain
from .complex import AbsoluteComplex, ComplexError

DEFAULT_TOL = 1e-8
DENSE_LIMIT = 3000
P_NOTE = "finite complex: L_p cohomology dimension does not depend on p"
HEURISTIC_NOTE = (
    "heuristic: finite truncations (full subcomplexes, no boundary conditions) "
    "cannot decide essential-spectrum questions"
)


def lp_norm(c: SparseChain, p: float = 2.0) -> float:
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    vals = np.abs(np.array([float(v) for v in c.coeffs.values()], dtype=float))
    if vals.size == 0:
        return 0.0
    if np.isinf(p):
        return float(vals.max())
    return float(np.sum(vals**p) ** (1.0 / p))


def coboundary_matrix(K: AbsoluteComplex, q: int) -> CellOperator:
    """d_q from degree q to degree q+1, the transpose of ``boundary_matrix(K, q)``."""
    return K.boundary_matrix(q).T


def laplacian(K: AbsoluteComplex, q: int) -> CellOperator:
    """Delta_q = d_{q-1} del_{q-1} + del_q d_q, assembled in exact arithmetic."""
    down = K.boundary_matrix(q - 1)  # degree q -> q-1
    up = K.boundary_matrix(q)  # degree q+1 -> q
    return down.T @ down + up @ up.T


def _laplacian_sparse(K: AbsoluteComplex, q: int) -> sp.csr_matrix:
    down = K.boundary_matrix(q - 1).to_scipy()
    up = K.boundary_matrix(q).to_scipy()
    L = (down.T @ down + up @ up.T).tocsr()
    L.sort_indices()
    return L


def betti(K: AbsoluteComplex, q: int, p: float = 2.0) -> int:
    """b_q = #q-cells - rank del_{q-1} - rank del_q, by exact rank.

    On a finite complex the answer does not depend on p (see ``P_NOTE``).
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    n = len(K.cells(q))
    if n == 0:
        return 0
    return n - exact.rank(K.boundary_matrix(q - 1)) - exact.rank(K.boundary_matrix(q))


def betti_numbers(K: AbsoluteComplex) -> tuple[int, ...]:
    return tuple(betti(K, q) for q in range(K.dimension + 1))


# ---------------------------------------------------------------------------
# spectra


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    norm: float
    threshold: float
    kernel_dim: int
    vectors: np.ndarray | None = None


def _dense_spectrum(L: sp.spmatrix, tol: float, want_vectors: bool) -> Spectrum:
    A = L.toarray()
    if want_vectors:
        w, V = la.eigh(A)
    else:
        w, V = la.eigh(A, eigvals_only=True), None
    norm = float(max(abs(w[0]), abs(w[-1])))
    thr = tol * norm
    kdim = int(np.sum(w <= thr))
    return Spectrum(w, norm, thr, kdim, V)


def _sparse_spectrum(K, q, L: sp.spmatrix, tol: float, want_vectors: bool, seed: int = 0) -> Spectrum:
    n = L.shape[0]
    rng = np.random.default_rng(seed)
    norm = float(spla.eigsh(L, k=1, which="LA", v0=rng.standard_normal(n), return_eigenvectors=False)[0])
    thr = tol * norm
    kdim = betti(K, q)
    k = min(n - 1, kdim + 6)
    # shift slightly below zero so the factorisation stays regular on the kernel
    w, V = spla.eigsh(L, k=k, sigma=-1e-3 * max(norm, 1.0), which="LM", v0=rng.standard_normal(n))
    order = np.argsort(w)
    w, V = w[order], V[:, order]
    return Spectrum(w, norm, thr, int(np.sum(w <= thr)), V if want_vectors else None)


def spectrum(K: AbsoluteComplex, q: int, tol: float = DEFAULT_TOL, want_vectors: bool = False,
             seed: int = 0) -> Spectrum:
    """Eigen-data of Delta_q: dense below ``DENSE_LIMIT`` cells, else partial (smallest)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = len(K.cells(q))
    if n == 0:
        return Spectrum(np.zeros(0), 0.0, 0.0, 0, np.zeros((0, 0)) if want_vectors else None)
    L = _laplacian_sparse(K, q)
    if n < DENSE_LIMIT or n < 10:
        return _dense_spectrum(L, tol, want_vectors)
    return _sparse_spectrum(K, q, L, tol, want_vectors, seed)


def harmonic_space(K: AbsoluteComplex, q: int, tol: float = DEFAULT_TOL) -> list[SparseChain]:
    """Orthonormal basis of ker Delta_q (eigenvalues <= tol * ||Delta_q||)."""
    spec = spectrum(K, q, tol, want_vectors=True)
    ids = K.cells(q)
    return [
        SparseChain.from_vector(q, ids, _clean(spec.vectors[:, i]))
        for i in range(len(spec.eigenvalues))
        if spec.eigenvalues[i] <= spec.threshold
    ]


def _clean(v: np.ndarray) -> np.ndarray:
    # fix the sign so the largest entry is positive; keeps output deterministic
    k = int(np.argmax(np.abs(v)))
    return v if v[k] >= 0 else -v


@dataclass
class SpectralGap:
    value: float
    empty: bool = False
    kernel_dim: int = 0
    norm: float = 0.0

    def __float__(self) -> float:
        return self.value


def spectral_gap(K: AbsoluteComplex, q: int, tol: float = DEFAULT_TOL, seed: int = 0) -> SpectralGap:
    """Smallest eigenvalue of Delta_q above tol * ||Delta_q||; 0 when Delta_q = 0."""
    spec = spectrum(K, q, tol, seed=seed)
    if spec.eigenvalues.size == 0:
        return SpectralGap(0.0, True, 0, 0.0)
    above = spec.eigenvalues[spec.eigenvalues > spec.threshold]
    gap = float(above[0]) if above.size else 0.0
    return SpectralGap(gap, False, spec.kernel_dim, spec.norm)


# ---------------------------------------------------------------------------
# Hodge decomposition


@dataclass
class HodgeDecomposition:
    harmonic: SparseChain
    exact: SparseChain
    coexact: SparseChain
    residuals: dict = field(default_factory=dict)


def _project(A: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, float]:
    """Orthogonal projection of c onto the column space of A, plus the normal-equation residual.

    Uses an SVD basis of the range; scipy's gelsd driver returned wrong
    minimisers on wide rank-deficient boundary matrices.
    """
    if A.shape[1] == 0 or not np.any(A):
        return np.zeros_like(c), 0.0
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > s[0] * max(A.shape) * np.finfo(float).eps))
    Ur = U[:, :r]
    proj = Ur @ (Ur.T @ c)
    # A^T (c - proj) vanishes for the exact projection
    res = float(np.linalg.norm(A.T @ (c - proj)))
    return proj, res


def hodge_decompose(K: AbsoluteComplex, q: int, c: SparseChain) -> HodgeDecomposition:
    """Split c into harmonic + exact (im d_{q-1}) + coexact (im del_q) parts."""
    if c.degree != q:
        raise ValueError(f"chain has degree {c.degree}, expected {q}")
    ids = K.cells(q)
    v = c.to_vector(ids)
    D = K.boundary_matrix(q - 1).T.toarray()  # d_{q-1}: degree q-1 -> q
    B = K.boundary_matrix(q).toarray()  # del_q: degree q+1 -> q
    e, res_e = _project(D, v)
    co, res_c = _project(B, v)
    h = v - e - co
    scale = max(float(np.linalg.norm(v)), 1.0)
    residuals = {
        "exact_normal": res_e / scale,
        "coexact_normal": res_c / scale,
        "harmonic_laplacian": float(np.linalg.norm(_laplacian_sparse(K, q) @ h)) / scale,
    }
    return HodgeDecomposition(
        SparseChain.from_vector(q, ids, h, c.p),
        SparseChain.from_vector(q, ids, e, c.p),
        SparseChain.from_vector(q, ids, co, c.p),
        residuals,
    )


# ---------------------------------------------------------------------------
# exhaustion families


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("COARSE_COMPLEX_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ExhaustionFamily:
    """Nested complexes indexed by a size parameter, with stable cell ids."""

    generator: Callable[[int], AbsoluteComplex]
    description: str = ""

    def __call__(self, size: int) -> AbsoluteComplex:
        return self.generator(size)

    def check_nested(self, sizes: Sequence[int]) -> list[AbsoluteComplex]:
        complexes = [self.generator(n) for n in sizes]
        for (a, Ka), (b, Kb) in zip(zip(sizes, complexes), zip(sizes[1:], complexes[1:])):
            for c in Ka.cells():
                if c not in Kb or Kb.dim(c) != Ka.dim(c):
                    raise ComplexError(f"family is not nested: cell {c!r} of size {a} missing at size {b}")
            for (x, y), e in Ka.incidence.items():
                if Kb.eps(x, y) != e:
                    raise ComplexError(f"family is not nested: incidence ({x!r}, {y!r}) changes at size {b}")
        return complexes


@dataclass
class GapTrend:
    sizes: list
    gaps: list
    verdict: str
    strictly_decreasing: bool
    heuristic: bool = True
    note: str = HEURISTIC_NOTE
    description: str = ""


def gap_trend(family: ExhaustionFamily, q: int, sizes: Sequence[int], tol: float = DEFAULT_TOL) -> GapTrend:
    sizes = list(sizes)
    if len(sizes) < 2:
        raise ValueError("gap trend needs at least two sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    complexes = family.check_nested(sizes)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        gaps = list(pool.map(lambda K: spectral_gap(K, q, tol).value, complexes))
    first, last = gaps[0], gaps[-1]
    if last <= first / 2:
        verdict = "vanishing-gap evidence"
    elif last >= 0.9 * first:
        verdict = "gap-persists evidence"
    else:
        verdict = "inconclusive"
    dec = all(b < a for a, b in zip(gaps, gaps[1:]))
    return GapTrend(sizes, gaps, verdict, dec, description=family.description)


def cylinder_family(around: int = 6) -> ExhaustionFamily:
    from .fixtures import cylinder

    return ExhaustionFamily(lambda n: cylinder(n, around), f"cylinder S^1_{around} x [0,N]")


def disjoint_triangles_family() -> ExhaustionFamily:
    from .fixtures import disjoint_triangles

    return ExhaustionFamily(disjoint_triangles, "N disjoint triangles")


FAMILIES = {
    "cylinder": cylinder_family,
    "triangles": disjoint_triangles_family,
}
