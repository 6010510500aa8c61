"""Finite metric spaces, maps between them, and the distances between spaces.

Distances are stored as exact ``Fraction`` matrices.  Hausdorff and
Gromov-Hausdorff values stay exact; the Lipschitz distances involve a natural
logarithm and are returned as floats computed from exact dilatations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

from . import kernels

TRIANGLE_TOL = Fraction(1, 10**12)
MAX_GH_ITERATIONS = 200
MAX_BIJECTION_SIZE = 9


class MetricError(ValueError):
    pass


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        if not math.isfinite(v):
            raise MetricError(f"non-finite distance {v}")
        return Fraction(v)
    return Fraction(v)


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Point ids plus a symmetric distance matrix with zero diagonal."""

    points: tuple
    dist: tuple

    def __init__(self, dist: Sequence[Sequence], points: Sequence | None = None, validate: bool = True):
        n = len(dist)
        mat = tuple(tuple(_as_fraction(v) for v in row) for row in dist)
        if any(len(row) != n for row in mat):
            raise MetricError("distance matrix is not square")
        pts = tuple(points) if points is not None else tuple(range(n))
        if len(pts) != n:
            raise MetricError("point list and matrix sizes differ")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "dist", mat)
        if validate:
            problem = self.violation()
            if problem:
                raise MetricError(problem)

    def violation(self) -> str | None:
        """First failed metric axiom as a message, or None."""
        d = self.dist
        n = len(d)
        for i in range(n):
            if d[i][i] != 0:
                return f"nonzero diagonal at point {i}"
            for j in range(i + 1, n):
                if abs(d[i][j] - d[j][i]) > TRIANGLE_TOL:
                    return f"asymmetric distance between {i} and {j}"
                if d[i][j] <= 0:
                    return f"nonpositive distance between distinct points {i} and {j}"
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if d[i][k] - d[i][j] - d[j][k] > TRIANGLE_TOL:
                        return f"triangle inequality fails for ({i}, {j}, {k})"
        return None

    def __len__(self) -> int:
        return len(self.points)

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    def diameter(self) -> Fraction:
        return max((v for row in self.dist for v in row), default=Fraction(0))

    def subspace(self, idx: Sequence[int]) -> "FiniteMetricSpace":
        return FiniteMetricSpace(
            [[self.dist[i][j] for j in idx] for i in idx], [self.points[i] for i in idx], validate=False
        )


def common_scale(*spaces: FiniteMetricSpace) -> tuple[list, int]:
    """Integer matrices of all spaces on one common scale."""
    scale = 1
    for X in spaces:
        for row in X.dist:
            for v in row:
                scale = lcm(scale, v.denominator)
    mats = [[[int(v * scale) for v in row] for row in X.dist] for X in spaces]
    return mats, scale


# ---------------------------------------------------------------------------
# Hausdorff distance


def hausdorff_distance(ambient: FiniteMetricSpace, X: Sequence[int], Y: Sequence[int]) -> Fraction:
    """max of the two one-sided max-min distances between point subsets."""
    X, Y = list(X), list(Y)
    if not X or not Y:
        raise MetricError("empty subset")
    d = ambient.dist
    one = max(min(d[x][y] for y in Y) for x in X)
    two = max(min(d[x][y] for x in X) for y in Y)
    return max(one, two)


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class MetricMap:
    source: FiniteMetricSpace
    target: FiniteMetricSpace
    assignment: tuple

    def __init__(self, source, target, assignment):
        assignment = tuple(int(a) for a in assignment)
        if len(assignment) != len(source):
            raise MetricError("every source point needs exactly one image")
        if any(not 0 <= a < len(target) for a in assignment):
            raise MetricError("image index outside the target space")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "assignment", assignment)

    def __call__(self, i: int) -> int:
        return self.assignment[i]


def dilatation(f: MetricMap) -> Fraction:
    n = len(f.source)
    if n < 2:
        raise MetricError("dilatation undefined for a one-point source")
    ds, dt = f.source.dist, f.target.dist
    return max(
        dt[f(a)][f(b)] / ds[a][b] for a in range(n) for b in range(a + 1, n)
    )


@dataclass
class MapConstants:
    semilinear_constant: Fraction
    expansion: list = field(default_factory=list)
    dilatation: Fraction | None = None


def classify_map(f: MetricMap) -> MapConstants:
    """Constants describing how coarse a map is.

    ``semilinear_constant`` is the least C with d(fa, fb) <= d(a, b) + C;
    ``expansion`` lists (R, S(R)) with S(R) the largest image distance among
    pairs at source distance <= R, for every realised R.
    """
    n = len(f.source)
    ds, dt = f.source.dist, f.target.dist
    pairs = [(ds[a][b], dt[f(a)][f(b)]) for a in range(n) for b in range(a + 1, n)]
    C = max((t - s for s, t in pairs), default=Fraction(0))
    C = max(C, Fraction(0))
    radii = sorted({s for s, _ in pairs})
    expansion = []
    for R in radii:
        expansion.append((R, max(t for s, t in pairs if s <= R)))
    dil = dilatation(f) if n >= 2 else None
    return MapConstants(C, expansion, dil)


# ---------------------------------------------------------------------------
# Gromov-Hausdorff distance


@dataclass
class AdmissibleExtension:
    """Cross distances rho[x][y] between the points of X and Y."""

    cross: list

    def combined(self, X: FiniteMetricSpace, Y: FiniteMetricSpace) -> FiniteMetricSpace:
        nx = len(X)
        top = [list(X.dist[i]) + list(self.cross[i]) for i in range(nx)]
        bottom = [[self.cross[i][j] for i in range(nx)] + list(Y.dist[j]) for j in range(len(Y))]
        return FiniteMetricSpace(top + bottom, validate=False)


def admissible_violation(X: FiniteMetricSpace, Y: FiniteMetricSpace, ext: AdmissibleExtension,
                         strict: bool = True) -> str | None:
    """None when the disjoint union metric is valid (positive cross entries if strict)."""
    rho = [[_as_fraction(v) for v in row] for row in ext.cross]
    for i, row in enumerate(rho):
        for j, v in enumerate(row):
            if v < 0 or (strict and v == 0):
                return f"cross distance ({i}, {j}) is not positive"
    Z = AdmissibleExtension(rho).combined(X, Y)
    d = Z.dist
    n = len(d)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i][k] > d[i][j] + d[j][k]:
                    return f"triangle inequality fails for ({i}, {j}, {k}) in the union"
    return None


def hausdorff_under_extension(X: FiniteMetricSpace, Y: FiniteMetricSpace, ext: AdmissibleExtension) -> Fraction:
    Z = ext.combined(X, Y)
    nx = len(X)
    return hausdorff_distance(Z, range(nx), range(nx, nx + len(Y)))


def admissible_extension(X: FiniteMetricSpace, Y: FiniteMetricSpace, correspondence, eps) -> AdmissibleExtension:
    """Shortest-path metric on X + Y with every corresponded pair at distance eps.

    When the correspondence has distortion <= 2 eps the path metric restricts to
    d_X and d_Y and puts each point within eps of the other side.
    """
    eps = _as_fraction(eps)
    nx, ny = len(X), len(Y)
    n = nx + ny
    inf = None
    D = [[inf] * n for _ in range(n)]
    for i in range(nx):
        for j in range(nx):
            D[i][j] = X.dist[i][j]
    for i in range(ny):
        for j in range(ny):
            D[nx + i][nx + j] = Y.dist[i][j]
    for x, y in correspondence:
        D[x][nx + y] = D[nx + y][x] = eps
    for k in range(n):
        Dk = D[k]
        for i in range(n):
            dik = D[i][k]
            if dik is None:
                continue
            Di = D[i]
            for j in range(n):
                dkj = Dk[j]
                if dkj is None:
                    continue
                s = dik + dkj
                if Di[j] is None or s < Di[j]:
                    Di[j] = s
    return AdmissibleExtension([[D[i][nx + j] for j in range(ny)] for i in range(nx)])


def distortion(X: FiniteMetricSpace, Y: FiniteMetricSpace, correspondence) -> Fraction:
    pairs = list(correspondence)
    return max(
        (abs(X.dist[a][b] - Y.dist[c][e]) for a, c in pairs for b, e in pairs),
        default=Fraction(0),
    )


def gh_feasible(X: FiniteMetricSpace, Y: FiniteMetricSpace, eps) -> list | None:
    """A correspondence admitting an extension with Hausdorff distance <= eps."""
    eps = _as_fraction(eps)
    if eps <= 0:
        return None
    (DX, DY), scale = common_scale(X, Y)
    # integer distortions: |DX - DY| <= 2 eps scale  <=>  <= floor(2 eps scale)
    threshold = math.floor(2 * eps * scale)
    return kernels.correspondence_search(DX, DY, threshold)


@dataclass
class GHInterval:
    lower: Fraction
    upper: Fraction
    correspondence: list | None = None
    iterations: int = 0

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def __contains__(self, value) -> bool:
        return self.lower <= value <= self.upper


class GHNonConvergence(RuntimeError):
    def __init__(self, interval: GHInterval):
        super().__init__(
            f"bisection did not reach the tolerance; best interval [{float(interval.lower)}, {float(interval.upper)}]"
        )
        self.interval = interval


def _dyadic_at_least(value: Fraction) -> Fraction:
    p = Fraction(1)
    while p < value:
        p *= 2
    while p / 2 >= value and p / 2 > 0:
        p /= 2
    return p


def gh_distance(X: FiniteMetricSpace, Y: FiniteMetricSpace, tol=1e-8,
                max_iter: int = MAX_GH_ITERATIONS) -> GHInterval:
    """Interval of width <= tol containing the Gromov-Hausdorff distance.

    Bisection over binary rationals; each step asks whether some admissible
    metric on X + Y puts the two sets within eps of each other.
    """
    if len(X) == 0 or len(Y) == 0:
        raise MetricError("empty metric space")
    tol = _as_fraction(tol)
    if tol <= 0:
        raise MetricError("tolerance must be positive")
    top = max(X.diameter(), Y.diameter()) / 2
    hi = _dyadic_at_least(top) if top > 0 else _dyadic_at_least(tol)
    lo = Fraction(0)
    witness = gh_feasible(X, Y, hi)
    if witness is None:  # pragma: no cover - the full relation always works
        raise RuntimeError("full relation rejected")
    it = 0
    while hi - lo > tol:
        if it >= max_iter:
            raise GHNonConvergence(GHInterval(lo, hi, witness, it))
        mid = (lo + hi) / 2
        found = gh_feasible(X, Y, mid)
        if found is not None:
            hi, witness = mid, found
        else:
            lo = mid
        it += 1
    return GHInterval(lo, hi, witness, it)


# ---------------------------------------------------------------------------
# Lipschitz distances


@dataclass
class LipschitzWitness:
    value: float
    phi: tuple
    psi: tuple | None
    dil_phi: Fraction
    dil_psi: Fraction | None
    displacement: Fraction


def _dil_assignment(src: FiniteMetricSpace, tgt: FiniteMetricSpace, f) -> Fraction:
    n = len(src)
    if n < 2:
        return Fraction(0)
    return max(tgt.dist[f[a]][f[b]] / src.dist[a][b] for a in range(n) for b in range(a + 1, n))


def lipschitz_witness(X: FiniteMetricSpace, Y: FiniteMetricSpace, max_size: int = 4) -> LipschitzWitness:
    """Optimal map pair for the Lipschitz distance by exhaustive enumeration.

    A one-point source has no pairs; its dilatation is taken as 0, so its log
    term vanishes.
    """
    nx, ny = len(X), len(Y)
    if nx == 0 or ny == 0:
        raise MetricError("empty metric space")
    budget = max_size ** max_size * max_size ** max_size
    if ny ** nx * nx ** ny > budget:
        raise MetricError("instance too large for exact d_L")
    (DX, DY), scale = common_scale(X, Y)
    value, phi, psi = kernels.best_map_pair(DX, DY, scale)
    disp = max(X.dist[psi[phi[x]]][x] for x in range(nx)) + max(Y.dist[phi[psi[y]]][y] for y in range(ny))
    return LipschitzWitness(value, phi, psi, _dil_assignment(X, Y, phi), _dil_assignment(Y, X, psi), disp)


def lipschitz_distance_dL(X: FiniteMetricSpace, Y: FiniteMetricSpace, max_size: int = 4) -> float:
    return lipschitz_witness(X, Y, max_size).value


def lipschitz_top_witness(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> LipschitzWitness | None:
    n = len(X)
    if n != len(Y):
        return None
    if n > MAX_BIJECTION_SIZE:
        raise MetricError(f"bijection search limited to {MAX_BIJECTION_SIZE} points")
    if n == 0:
        raise MetricError("empty metric space")
    (DX, DY), _scale = common_scale(X, Y)
    value, f = kernels.best_bijection(DX, DY)
    inv = [0] * n
    for i, y in enumerate(f):
        inv[y] = i
    return LipschitzWitness(value, f, tuple(inv), _dil_assignment(X, Y, f), _dil_assignment(Y, X, inv), Fraction(0))


def lipschitz_top_distance(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    w = lipschitz_top_witness(X, Y)
    return math.inf if w is None else w.value
