import random
from fractions import Fraction

import numpy as np
import pytest

from coarse_complex import fixtures as F
from coarse_complex.chains import SparseChain
from coarse_complex.complex import ComplexError
from coarse_complex.duality import (
    CocycleClass,
    ManifoldPairDescription,
    OrientationError,
    cohomology_basis,
    cs_bordism_compare,
    cup,
    cup_product,
    evaluate,
    fundamental_cycle,
    glue_pair,
    glue_pair_oriented,
    homology_basis,
    intersection_form,
    pair_char_numbers,
    pair_signature,
    poincare_duality_check,
    relabel_pair,
    relabel_vertices,
)
from coarse_complex.hodge import betti_numbers

from conftest import exact_betti


def boundary_is_zero(K, z) -> bool:
    n = z.degree
    B = K.boundary_matrix(n - 1).toarray()
    return not np.any(B @ z.to_vector(K.cells(n)))


def test_octahedron_fundamental_cycle():
    K = F.octahedron()
    z = fundamental_cycle(K)
    assert len(z.support()) == 8
    assert set(abs(v) for v in z.coeffs.values()) == {1}
    assert boundary_is_zero(K, z)


def test_rp2_non_orientable():
    with pytest.raises(OrientationError, match="non-orientable"):
        fundamental_cycle(F.rp2())


def test_seed_reversal_negates():
    K = F.torus()
    assert fundamental_cycle(K, seed_sign=-1) == -fundamental_cycle(K)


def test_unit_cocycle_is_cup_identity():
    K = F.torus()
    one = SparseChain(0, {v: 1 for v in K.cells(0)})
    for b in cohomology_basis(K, 1):
        assert cup(K, one, b) == b


def test_torus_dual_cocycles_pair_to_unit():
    K = F.torus()
    alpha, beta = cohomology_basis(K, 1)
    z = fundamental_cycle(K)
    assert abs(evaluate(cup(K, alpha, beta), z)) == 1
    # duality with the homology basis is exact
    hb = homology_basis(K, 1)
    cells = K.cells(1)
    for i, a in enumerate((alpha, beta)):
        for j, h in enumerate(hb):
            assert sum(a[c] * h[k] for k, c in enumerate(cells)) == (i == j)


def test_cup_invariant_under_order_isomorphic_relabel():
    K = F.torus()
    perm = {v: 3 * v + 10 for v in K.vertex_labels()}
    K2, cmap, signs = relabel_vertices(K, perm)
    assert all(s == 1 for s in signs.values())
    alpha, beta = cohomology_basis(K, 1)
    z = fundamental_cycle(K)
    move = lambda ch: SparseChain(ch.degree, {cmap[c]: v for c, v in ch.coeffs.items()})
    assert evaluate(cup(K2, move(alpha), move(beta)), move(z)) == evaluate(cup(K, alpha, beta), z)


def test_cup_product_checks_cocycles():
    K = F.triangle()
    bad = CocycleClass(1, SparseChain(1, {K.cells(1)[0]: 1}))
    with pytest.raises(ValueError):
        cup_product(K, bad, bad)


def test_glue_discs_gives_sphere():
    G = glue_pair(F.disc_pair())
    assert tuple(exact_betti(G, q) for q in range(3)) == (1, 0, 1)


def test_double_is_orientable():
    P = F.trivial_pair(F.disc(2))
    G, z = glue_pair_oriented(P)
    assert boundary_is_zero(G, z)
    fundamental_cycle(G)


def test_dropping_boundary_edge_is_rejected():
    P = F.disc_pair()
    ident = dict(P.identification)
    edge = next(c for c in ident if P.core1.dim(c) == 1)
    del ident[edge]
    with pytest.raises((ComplexError, ValueError), match="boundary mismatch"):
        glue_pair(ManifoldPairDescription(P.core1, P.core0, ident))


def test_s4_form_is_empty():
    form = intersection_form(F.sphere(4))
    assert form.matrix == [] and form.signature == 0


def test_cp2_signature_and_reversal():
    K = F.cp2()
    form = intersection_form(K)
    assert form.signature == 1 and len(form.matrix) == 1
    assert form.matrix[0][0] > 0
    assert intersection_form(K, fundamental_cycle(K, seed_sign=-1)).signature == -1


def test_pair_signatures():
    P = F.cp2_pair()
    assert pair_signature(P) == 1
    assert pair_signature(P.swapped()) == -1
    assert pair_signature(F.trivial_pair()) == 0
    assert pair_signature(F.trivial_pair(P.core1)) == 0


def test_char_numbers_zero_and_scaled():
    P = F.cp2_pair()
    G, z = glue_pair_oriented(P)
    zero = CocycleClass(4, SparseChain(4, {}))
    assert pair_char_numbers(P, [[[(zero, 1)]]]) == [0]
    (b,) = cohomology_basis(G, 4)
    top = CocycleClass(4, b * (Fraction(3) / evaluate(b, z)))
    assert pair_char_numbers(P, [[[(top, 1)]]]) == [3]


def test_char_numbers_mod2():
    P = F.cp2_pair()
    G, _ = glue_pair_oriented(P)
    (alpha,) = cohomology_basis(G, 2)
    w = CocycleClass(2, alpha, "mod2")
    assert pair_char_numbers(P, [[[(w, 2)]]]) == [1]


@pytest.mark.parametrize("name,betti,middle", [("S2", (1, 0, 1), None), ("torus", (1, 2, 1), 2)])
def test_duality_surfaces(name, betti, middle):
    r = poincare_duality_check(F.all_fixtures()[name])
    assert r.betti == betti and r.symmetric and r.passed
    assert r.cap_ranks == betti
    if middle is not None:
        assert r.cap_ranks[1] == middle


def test_duality_cp2():
    r = poincare_duality_check(F.cp2())
    assert r.betti == (1, 0, 1, 0, 1) and r.cap_ranks == r.betti and r.passed


def test_bordism_compare_outcomes():
    A = F.cp2_pair()
    v = cs_bordism_compare(A, F.trivial_pair())
    assert v.verdict == "distinguished" and "signature" in v.differing
    assert cs_bordism_compare(A, A).verdict == "not distinguished by supplied invariants"


def test_bordism_compare_relabelled():
    A = F.cp2_pair()
    rng = random.Random(3)
    labels1 = A.core1.vertex_labels()
    shuffled = labels1[:]
    rng.shuffle(shuffled)
    perm1 = dict(zip(labels1, shuffled))
    perm0 = {v: perm1.get(v, v) for v in A.core0.vertex_labels()}
    B = relabel_pair(A, perm1, perm0)
    assert pair_signature(B) == 1
    assert cs_bordism_compare(A, B).verdict == "not distinguished by supplied invariants"


def test_glued_cp2_betti():
    assert betti_numbers(glue_pair(F.cp2_pair())) == (1, 0, 1, 0, 1)
