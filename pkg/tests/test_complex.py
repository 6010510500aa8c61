import pytest
from hypothesis import given, strategies as st

from coarse_complex import fixtures as F
from coarse_complex.complex import (
    AbsoluteComplex,
    ComplexError,
    build_simplicial,
    perm_sign,
    ulf_degree,
    validate_incidence,
)

from conftest import exact_rank, random_complex


def test_three_edges_f_vector():
    K = build_simplicial([(0, 1), (1, 2), (2, 0)])
    assert K.f_vector() == (3, 3)


def test_triangle_f_vector():
    assert build_simplicial([(0, 1, 2)]).f_vector() == (3, 3, 1)


def test_repeated_vertex_rejected():
    with pytest.raises(ComplexError):
        build_simplicial([(0, 0, 1)])


@pytest.mark.parametrize("name", list(F.all_fixtures()))
def test_fixtures_pass_validation(name):
    assert validate_incidence(F.all_fixtures()[name]).passed


def test_flipped_sign_fails_and_names_pair():
    K = F.triangle()
    inc = dict(K.incidence)
    inc[("0,1", "0,1,2")] *= -1
    bad = AbsoluteComplex([(c, K.dim(c)) for c in K.cells()], inc)
    report = validate_incidence(bad)
    assert not report.passed
    assert report.failures
    x, y, _ = report.failures[0]
    assert K.dim(y) == K.dim(x) + 2


def test_circle_rank():
    assert exact_rank(F.circle(3).boundary_matrix(0)) == 2


def test_no_higher_cells_gives_zero_map():
    assert F.circle(3).boundary_matrix(1).is_zero()


def test_edge_boundary_column():
    B = F.edge().boundary_matrix(0)
    assert sorted(B.toarray()[:, 0].tolist()) == [-1.0, 1.0]


def test_ulf_degree_examples():
    assert ulf_degree(F.triangle(), 1) == 1
    assert ulf_degree(F.circle(3), 0) == 2


@pytest.mark.parametrize("seed", range(10))
def test_ulf_degree_brute_force(seed):
    K = random_complex(seed)
    for q in range(K.dimension + 1):
        brute = max(
            (sum(1 for y in K.cells(q + 1) if K.eps(x, y) != 0) for x in K.cells(q)),
            default=0,
        )
        assert ulf_degree(K, q) == brute


@pytest.mark.parametrize("seed", range(50))
def test_boundary_squares_to_zero(seed):
    K = random_complex(seed)
    for q in range(1, K.dimension):
        assert (K.boundary_matrix(q - 1) @ K.boundary_matrix(q)).is_zero()


def test_order_is_transitive_and_dimension_monotone():
    K = F.octahedron()
    for y in K.cells():
        for x in K.below(y):
            assert K.dim(x) < K.dim(y)
            for z in K.below(x):
                assert K.less(z, y)


@given(st.permutations(list(range(5))))
def test_perm_sign_matches_inversion_count(p):
    inv = sum(1 for i in range(5) for j in range(i + 1, 5) if p[i] > p[j])
    assert perm_sign(p) == (-1) ** inv
