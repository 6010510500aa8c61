import math

import numpy as np
import pytest

from coarse_complex import fixtures as F
from coarse_complex.chains import CellOperator
from coarse_complex.hodge import coboundary_matrix, laplacian
from coarse_complex.operators import (
    LocalityBudgetError,
    classify_locality,
    norm_bound_vicinal,
    operator_norm,
    vicinality,
)


def power_iteration_norm(A: np.ndarray, iters: int = 2000) -> float:
    """Largest singular value by power iteration on A^T A."""
    if not A.any():
        return 0.0
    x = np.random.default_rng(1).normal(size=A.shape[1])
    for _ in range(iters):
        y = A.T @ (A @ x)
        x = y / np.linalg.norm(y)
    return float(np.linalg.norm(A @ x))


def random_vicinal(rng, n: int, k: int) -> CellOperator:
    """n x n operator with at most k nonzeros per row and per column."""
    A = np.zeros((n, n))
    for shift in rng.choice(n, size=k, replace=False):
        for i in range(n):
            A[i, (i + shift) % n] = rng.integers(-5, 6)
    ids = [str(i) for i in range(n)]
    return CellOperator.from_dense(0, 0, ids, ids, A.astype(int).tolist())


def test_vicinality_examples():
    ids = [str(i) for i in range(5)]
    assert vicinality(CellOperator.identity(0, ids), cap=5) == 1
    assert vicinality(coboundary_matrix(F.circle(3), 0), cap=5) == 2
    ones = CellOperator.from_dense(0, 0, ids, ids, [[1] * 5] * 5)
    assert vicinality(ones, cap=3) is None


def test_norm_bound_examples():
    ids = [str(i) for i in range(4)]
    assert norm_bound_vicinal(CellOperator.zero(0, 0, ids, ids)) == 0
    d0 = coboundary_matrix(F.circle(3), 0)
    assert norm_bound_vicinal(d0, 2) == 2
    assert math.isclose(operator_norm(d0, 2), math.sqrt(3))
    assert math.isclose(power_iteration_norm(d0.toarray()), math.sqrt(3), rel_tol=1e-9)


def test_norm_bound_random_vicinal():
    rng = np.random.default_rng(5)
    for _ in range(100):
        T = random_vicinal(rng, int(rng.integers(3, 12)), int(rng.integers(1, 3)))
        A = T.toarray()
        bound = norm_bound_vicinal(T, 2)
        assert bound >= power_iteration_norm(A) - 1e-9
        assert bound >= np.abs(A).sum(axis=0).max() - 1e-9
        assert bound >= np.abs(A).sum(axis=1).max() - 1e-9


@pytest.mark.parametrize("name", ["edge", "triangle", "C3", "S2", "RP2", "torus"])
def test_natural_operators_are_local(name):
    K = F.all_fixtures()[name]
    for q in range(K.dimension):
        for T in (K.boundary_matrix(q), coboundary_matrix(K, q)):
            r = classify_locality(T, K, K, radius=1)
            assert r.is_local and r.local_radius <= 1 and r.complete
    r = classify_locality(laplacian(K, 0), K, K, radius=1)
    assert r.local_radius == 1


def test_identity_radius_zero():
    K = F.torus()
    r = classify_locality(CellOperator.identity(1, K.cells(1)), K, K, radius=2)
    assert r.local_radius == 0 and r.nearly_local_constant == 1


def test_perturbed_coboundary_is_only_nearly_local():
    K = F.circle(12)
    d0 = coboundary_matrix(K, 0)
    entries = dict(d0.entries)
    key = min(entries)
    entries[key] *= 2
    T = CellOperator(0, 1, d0.rows, d0.cols, entries)
    r = classify_locality(T, K, K, radius=1)
    assert not r.conditions["3"]
    assert r.violation is not None
    assert r.nearly_local_constant is not None and 1 < r.nearly_local_constant < math.inf


def test_locality_budget():
    K = F.cylinder(60)
    with pytest.raises(LocalityBudgetError):
        classify_locality(K.boundary_matrix(0), K, K)
