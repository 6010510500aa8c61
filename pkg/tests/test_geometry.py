import math

import numpy as np
import pytest

from coarse_complex import fixtures as F
from coarse_complex.complex import build_simplicial
from coarse_complex.geometry import (
    GeometricComplex,
    barycentric_gradient_bound,
    fullness,
    simplex_volume,
    uniformity_check,
)


def test_fullness_equilateral():
    pts = [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)]
    assert math.isclose(fullness(pts), math.sqrt(3) / 4)


def test_fullness_degenerate():
    assert fullness([(0, 0), (1, 0), (2, 0)]) == pytest.approx(0.0, abs=1e-15)


def test_fullness_right_triangle():
    pts = [(0, 0), (1, 0), (0, 1)]
    assert math.isclose(simplex_volume(pts), 0.5)
    assert math.isclose(fullness(pts), 0.25)


def test_volume_in_higher_ambient_space():
    # a unit right triangle placed in R^3
    assert math.isclose(simplex_volume([(0, 0, 1), (1, 0, 1), (0, 1, 1)]), 0.5)


def test_gradient_bound_matches_inverse_height():
    # |grad phi_v| is 1 / (distance from v to the opposite side)
    pts = np.array([(0, 0), (2, 0), (0, 1)], dtype=float)
    assert math.isclose(barycentric_gradient_bound(pts), 1 / (2 / math.sqrt(5)))


def test_patch_passes():
    r = uniformity_check(F.triangular_patch(), 0.4, 0.6, 0.4, 3)
    assert r.passed


def test_sliver_fails_condition_a():
    G = F.sliver_square(height=0.002)
    r = uniformity_check(G, 0.1, 10, 1e-6, 1e6)
    assert not r.conditions["a"]["pass"]
    assert r.conditions["a"]["worst"] == pytest.approx(1e-3, rel=0.05)


def test_empty_complex_passes():
    assert uniformity_check(GeometricComplex(build_simplicial([]), {}), 1, 1, 1, 1).passed
