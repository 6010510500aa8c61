import math
import random
from fractions import Fraction

import pytest

from coarse_complex.metric import (
    AdmissibleExtension,
    FiniteMetricSpace,
    MetricError,
    MetricMap,
    admissible_extension,
    admissible_violation,
    classify_map,
    dilatation,
    gh_distance,
    hausdorff_distance,
    hausdorff_under_extension,
    lipschitz_distance_dL,
    lipschitz_top_distance,
)

from metric_oracles import dL_oracle, dLtop_oracle, gh_by_correspondences, gh_by_extension_grid, random_space

LINE = FiniteMetricSpace([[abs(i - j) for j in range(4)] for i in range(4)])


def two_point(d):
    return FiniteMetricSpace([[0, d], [d, 0]])


POINT = FiniteMetricSpace([[0]])


def test_space_rejects_bad_matrices():
    with pytest.raises(MetricError):
        FiniteMetricSpace([[0, 1], [2, 0]])
    with pytest.raises(MetricError):
        FiniteMetricSpace([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(MetricError):
        FiniteMetricSpace([[0, 0], [0, 0]])


def test_hausdorff_examples():
    assert hausdorff_distance(LINE, [1, 2], [1, 2]) == 0
    assert hausdorff_distance(LINE, [0], [0, 3]) == 3
    assert hausdorff_distance(LINE, [0, 3], [1, 2]) == 1


def test_hausdorff_empty_subset():
    with pytest.raises(MetricError):
        hausdorff_distance(LINE, [], [1])


def test_dilatation_examples():
    assert dilatation(MetricMap(LINE, LINE, range(4))) == 1
    assert dilatation(MetricMap(two_point(1), two_point(2), [0, 1])) == 2
    assert dilatation(MetricMap(LINE, LINE, [2] * 4)) == 0


def test_classify_map_examples():
    assert classify_map(MetricMap(LINE, LINE, range(4))).semilinear_constant == 0
    assert classify_map(MetricMap(two_point(1), two_point(2), [0, 1])).semilinear_constant == 1
    assert classify_map(MetricMap(LINE, LINE, [0] * 4)).semilinear_constant == 0


def test_gh_isometric():
    iv = gh_distance(LINE, LINE, tol=1e-8)
    assert iv.lower == 0 and iv.upper <= Fraction(1, 10**8)


def test_gh_point_vs_space():
    Y = FiniteMetricSpace([[0, 1, 3], [1, 0, 2], [3, 2, 0]])
    iv = gh_distance(POINT, Y, tol=1e-9)
    assert Fraction(3, 2) in iv


def test_gh_two_point_spaces():
    iv = gh_distance(two_point(1), two_point(3), tol=1e-9)
    assert abs(float(iv.upper) - 1) <= 1e-8 and Fraction(1) in iv


def test_gh_two_point_grid_oracle():
    assert gh_by_extension_grid(two_point(1), two_point(3)) == 1
    for a, b in [(1, 2), (1, 4), (3, 1), (2, 5)]:
        X, Y = two_point(a), two_point(b)
        expected = gh_by_extension_grid(X, Y)
        assert expected == gh_by_correspondences(X, Y)
        assert expected in gh_distance(X, Y, tol=1e-9)


def test_gh_point_grid_oracle():
    Y = FiniteMetricSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert gh_by_extension_grid(POINT, Y) == 1 == Y.diameter() / 2


def test_gh_witness_is_admissible():
    X, Y = two_point(1), FiniteMetricSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    iv = gh_distance(X, Y, tol=1e-6)
    ext = admissible_extension(X, Y, iv.correspondence, iv.upper)
    assert admissible_violation(X, Y, ext) is None
    assert hausdorff_under_extension(X, Y, ext) <= iv.upper


def test_gh_bounded_by_random_extensions():
    rng = random.Random(7)
    checked = 0
    for _ in range(200):
        X, Y = random_space(rng, rng.randint(1, 3)), random_space(rng, rng.randint(1, 3))
        w = max(X.diameter(), Y.diameter()) / 2
        # bridge weights >= half the larger diameter keep both metrics intact
        cross = [[w + Fraction(rng.randint(0, 4), 2) for _ in range(len(Y))] for _ in range(len(X))]
        ext = AdmissibleExtension(cross)
        if admissible_violation(X, Y, ext) is not None:
            continue
        checked += 1
        assert gh_distance(X, Y, tol=1e-6).lower <= hausdorff_under_extension(X, Y, ext)
    assert checked > 150


def test_dl_examples():
    assert lipschitz_distance_dL(LINE, LINE) == 0
    assert math.isclose(lipschitz_distance_dL(two_point(1), two_point(2)), math.log(2))
    # Psi constant: d(Phi Psi y, y) reaches 2 on the far point
    assert lipschitz_distance_dL(POINT, two_point(2)) == dL_oracle(POINT, two_point(2)) == 2


def test_dl_budget():
    big = FiniteMetricSpace([[abs(i - j) for j in range(5)] for i in range(5)])
    with pytest.raises(MetricError, match="instance too large"):
        lipschitz_distance_dL(big, big)


def test_dltop_examples():
    assert lipschitz_top_distance(POINT, two_point(1)) == math.inf
    assert lipschitz_top_distance(LINE, LINE) == 0
    assert math.isclose(lipschitz_top_distance(two_point(1), two_point(2)), math.log(2))


@pytest.mark.parametrize("seed", range(10))
def test_distances_match_oracles(seed):
    rng = random.Random(seed)
    X, Y = random_space(rng, rng.randint(1, 3)), random_space(rng, rng.randint(1, 3))
    assert math.isclose(float(gh_distance(X, Y, tol=1e-9).upper), float(gh_by_correspondences(X, Y)), abs_tol=1e-6)
    assert lipschitz_distance_dL(X, Y) == dL_oracle(X, Y)
    assert lipschitz_top_distance(X, Y) == dLtop_oracle(X, Y)


def test_dl_triangle_inequality():
    rng = random.Random(11)
    for _ in range(30):
        X, Y, Z = (random_space(rng, 3) for _ in range(3))
        assert lipschitz_distance_dL(X, Z) <= lipschitz_distance_dL(X, Y) + lipschitz_distance_dL(Y, Z) + 1e-12
