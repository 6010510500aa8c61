"""Acceptance criteria 1-10; a pass/fail line per criterion is printed in the summary."""
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from coarse_complex import fixtures as F
from coarse_complex.chains import SparseChain
from coarse_complex.duality import (
    cs_bordism_compare,
    fundamental_cycle,
    intersection_form,
    pair_signature,
    poincare_duality_check,
    relabel_pair,
)
from coarse_complex.hodge import (
    betti,
    coboundary_matrix,
    cylinder_family,
    disjoint_triangles_family,
    gap_trend,
    hodge_decompose,
    laplacian,
    spectrum,
)
from coarse_complex.metric import (
    FiniteMetricSpace,
    gh_distance,
    lipschitz_distance_dL,
    lipschitz_top_distance,
)
from coarse_complex.operators import norm_bound_vicinal, operator_norm
from coarse_complex.subdivision import (
    barycentric_subdivide,
    block_complex,
    subdivision_invariance_check,
    theta_chain_map,
    vertex_translation,
)

from conftest import exact_betti, random_complex
from metric_oracles import dL_oracle, dLtop_oracle, gh_by_correspondences, random_space
from test_operators import power_iteration_norm, random_vicinal

CRITERIA = {
    1: "exact chain identities on fixtures and 50 random complexes",
    2: "Betti numbers: exact ranks agree with Laplacian kernels",
    3: "Hodge decomposition: reconstruction and orthogonality <= 1e-10",
    4: "barycentric subdivision preserves Betti numbers, Theta_* injective",
    5: "cylinder gaps vanish, disjoint triangles keep a constant gap",
    6: "vicinal bound N*M dominates operator norms for p in {1, 2, inf}",
    7: "signatures of S4, CP2, the double and the manifold pairs",
    8: "Poincare duality on S2, torus and CP2",
    9: "metric distances agree with brute-force oracles",
    10: "bordism comparison: CP2 pair vs trivial pair, relabelled copies",
}

FIXTURES = F.all_fixtures()
EXPECTED_BETTI = {
    "C3": (1, 1),
    "S2": (1, 0, 1),
    "torus": (1, 2, 1),
    "RP2": (1, 0, 0),
    "CP2": (1, 0, 1, 0, 1),
}


def _random_rational_chain(rng, cells, q):
    return SparseChain(q, {c: Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for c in cells})


def _check_chain_identities(K, rng):
    for q in range(1, K.dimension):
        assert (K.boundary_matrix(q - 1) @ K.boundary_matrix(q)).is_zero()
    for q in range(K.dimension):
        x = _random_rational_chain(rng, K.cells(q), q)
        y = _random_rational_chain(rng, K.cells(q + 1), q + 1)
        assert coboundary_matrix(K, q).apply(x).inner(y) == x.inner(K.boundary_matrix(q).apply(y))
    S = barycentric_subdivide(K)
    theta = theta_chain_map(S, block_complex(S))
    eta = vertex_translation(S)
    for q in range(1, K.dimension + 1):
        assert (S.K_sub.boundary_matrix(q - 1) @ theta[q] - theta[q - 1] @ K.boundary_matrix(q - 1)).is_zero()
    for q, T in theta.items():
        prod = eta.chain_maps[q] @ T
        assert prod.entries == {(i, i): 1 for i in range(len(K.cells(q)))}


def test_criterion_01_exact_chain_identities():
    rng = random.Random(1)
    for K in FIXTURES.values():
        _check_chain_identities(K, rng)
    for seed in range(50):
        K = random_complex(1000 + seed)
        assert len(K.cells()) <= 200
        _check_chain_identities(K, rng)


def test_criterion_02_betti_oracle():
    for name, K in FIXTURES.items():
        for q in range(K.dimension + 1):
            b = betti(K, q)
            assert b == exact_betti(K, q)
            assert spectrum(K, q, tol=1e-8).kernel_dim == b
    for name, expected in EXPECTED_BETTI.items():
        K = FIXTURES[name]
        assert tuple(betti(K, q) for q in range(K.dimension + 1)) == expected


def test_criterion_03_hodge_decomposition():
    rng = np.random.default_rng(3)
    for name, K in FIXTURES.items():
        for trial in range(100):
            q = trial % (K.dimension + 1)
            ids = K.cells(q)
            v = rng.normal(size=len(ids))
            H = hodge_decompose(K, q, SparseChain.from_vector(q, ids, v))
            h, e, c = (part.to_vector(ids) for part in (H.harmonic, H.exact, H.coexact))
            nv = np.linalg.norm(v)
            assert np.linalg.norm(h + e + c - v) <= 1e-10 * nv
            for a, b in ((h, e), (h, c), (e, c)):
                assert abs(a @ b) <= 1e-10 * nv**2


def test_criterion_04_subdivision_invariance():
    for name, K in FIXTURES.items():
        r = subdivision_invariance_check(barycentric_subdivide(K))
        assert r.betti_equal, name
        assert all(r.theta_homology_injective.values()), name
        assert all(r.theta_injective.values()), name


def test_criterion_05_gap_trend():
    cyl = gap_trend(cylinder_family(), 1, [4, 8, 16])
    assert cyl.gaps[2] < 0.5 * cyl.gaps[0]
    assert all(b < a for a, b in zip(cyl.gaps, cyl.gaps[1:]))
    tri = gap_trend(disjoint_triangles_family(), 1, [1, 2, 4, 8])
    assert all(abs(g - tri.gaps[0]) <= 1e-9 for g in tri.gaps)
    tri0 = gap_trend(disjoint_triangles_family(), 0, [1, 2, 4, 8])
    assert all(abs(g - tri0.gaps[0]) <= 1e-9 for g in tri0.gaps)


def _norms_dominated(T):
    A = T.toarray()
    bound = norm_bound_vicinal(T)
    measured = [
        np.abs(A).sum(axis=0).max(initial=0),
        power_iteration_norm(A, iters=300),
        np.abs(A).sum(axis=1).max(initial=0),
    ]
    for p, m in zip((1, 2, math.inf), measured):
        assert bound >= m - 1e-9
        assert bound >= operator_norm(T, p) - 1e-9


def test_criterion_06_vicinal_norm_bound():
    for K in FIXTURES.values():
        for q in range(K.dimension):
            _norms_dominated(K.boundary_matrix(q))
            _norms_dominated(coboundary_matrix(K, q))
        for q in range(K.dimension + 1):
            _norms_dominated(laplacian(K, q))
    rng = np.random.default_rng(6)
    for _ in range(100):
        _norms_dominated(random_vicinal(rng, int(rng.integers(3, 15)), int(rng.integers(1, 4))))


def test_criterion_07_signatures():
    assert intersection_form(F.sphere(4)).signature == 0
    cp2 = F.cp2()
    form = intersection_form(cp2, fundamental_cycle(cp2))
    assert form.signature == 1 and form.matrix == [[1]]
    P = F.cp2_pair()
    assert pair_signature(F.trivial_pair(P.core1)) == 0
    assert pair_signature(P) == 1
    assert pair_signature(F.trivial_pair()) == 0
    for v in (form.signature, pair_signature(P)):
        assert isinstance(v, int)


def test_criterion_08_poincare_duality():
    for K in (F.octahedron(), F.torus(), F.cp2()):
        r = poincare_duality_check(K)
        n = K.dimension
        assert all(r.betti[q] == r.betti[n - q] for q in range(n + 1))
        assert r.cap_ranks == r.betti and r.passed


def _gh_corpus():
    rng = random.Random(9)
    fixed = [
        (FiniteMetricSpace([[0]]), FiniteMetricSpace([[0]])),
        (FiniteMetricSpace([[0, 1], [1, 0]]), FiniteMetricSpace([[0, 3], [3, 0]])),
        (FiniteMetricSpace([[0]]), FiniteMetricSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]])),
    ]
    rand = [(random_space(rng, rng.randint(1, 3)), random_space(rng, rng.randint(1, 3))) for _ in range(17)]
    return fixed + rand


def test_criterion_09_metric_distances():
    for X, Y in _gh_corpus():
        iv = gh_distance(X, Y, tol=1e-8)
        oracle = gh_by_correspondences(X, Y)
        assert oracle in iv
        assert abs(float(iv.upper) - float(oracle)) <= 1e-6
    rng = random.Random(10)
    point = FiniteMetricSpace([[0]])
    for _ in range(10):
        X = random_space(rng, rng.randint(2, 6))
        assert abs(float(gh_distance(point, X, tol=1e-8).upper) - float(X.diameter()) / 2) <= 1e-6
    rng = random.Random(11)
    pairs = [(random_space(rng, a), random_space(rng, b)) for a in range(1, 5) for b in range(1, 5)]
    for X, Y in pairs:
        if len(X) * len(Y) <= 9:
            assert lipschitz_distance_dL(X, Y) == dL_oracle(X, Y)
        assert lipschitz_top_distance(X, Y) == dLtop_oracle(X, Y)
    X, Y = random_space(rng, 4), random_space(rng, 4)
    assert lipschitz_distance_dL(X, Y) == dL_oracle(X, Y)


def test_criterion_10_bordism_contrapositive():
    A = F.cp2_pair()
    first = cs_bordism_compare(A, F.trivial_pair())
    second = cs_bordism_compare(A, F.trivial_pair())
    assert first.verdict == second.verdict == "distinguished"
    assert first.invariants_a["signature"] == 1 and first.invariants_b["signature"] == 0
    labels = A.core1.vertex_labels()
    perm1 = {v: labels[(i + 4) % len(labels)] for i, v in enumerate(labels)}
    perm0 = {v: perm1[v] for v in A.core0.vertex_labels()}
    B = relabel_pair(A, perm1, perm0)
    for _ in range(2):
        assert cs_bordism_compare(A, B).verdict == "not distinguished by supplied invariants"
