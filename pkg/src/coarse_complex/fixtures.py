"""Standard complexes used throughout the test-suite and the CLI demos."""
from __future__ import annotations

import math
from itertools import combinations

from .complex import AbsoluteComplex, build_simplicial
from .geometry import GeometricComplex

# 9-vertex triangulation of the complex projective plane.  Labels are chosen so
# that the default fundamental cycle (seed +1 on the first facet) gives the
# intersection form (+1).
CP2_FACETS = (
    (0, 1, 2, 3, 6), (0, 1, 2, 3, 8), (0, 1, 2, 4, 6), (0, 1, 2, 4, 7),
    (0, 1, 2, 5, 7), (0, 1, 2, 5, 8), (0, 1, 3, 4, 6), (0, 1, 3, 4, 8),
    (0, 1, 4, 7, 8), (0, 1, 5, 7, 8), (0, 2, 3, 6, 8), (0, 2, 4, 5, 6),
    (0, 2, 4, 5, 7), (0, 2, 5, 6, 8), (0, 3, 4, 5, 6), (0, 3, 4, 5, 7),
    (0, 3, 4, 7, 8), (0, 3, 5, 6, 7), (0, 3, 6, 7, 8), (0, 5, 6, 7, 8),
    (1, 2, 3, 5, 7), (1, 2, 3, 5, 8), (1, 2, 3, 6, 7), (1, 2, 4, 6, 7),
    (1, 3, 4, 5, 6), (1, 3, 4, 5, 8), (1, 3, 5, 6, 7), (1, 4, 5, 6, 8),
    (1, 4, 6, 7, 8), (1, 5, 6, 7, 8), (2, 3, 4, 5, 7), (2, 3, 4, 5, 8),
    (2, 3, 4, 7, 8), (2, 3, 6, 7, 8), (2, 4, 5, 6, 8), (2, 4, 6, 7, 8),
)

RP2_FACETS = (
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5),
)

OCTAHEDRON_FACETS = tuple(
    (a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)
)


def point() -> AbsoluteComplex:
    return build_simplicial([[0]], name="point")


def edge() -> AbsoluteComplex:
    return build_simplicial([[0, 1]], name="edge")


def triangle() -> AbsoluteComplex:
    return build_simplicial([[0, 1, 2]], name="triangle")


def simplex(n: int) -> AbsoluteComplex:
    return build_simplicial([list(range(n + 1))], name=f"simplex{n}")


def circle(n: int = 3) -> AbsoluteComplex:
    return build_simplicial([[i, (i + 1) % n] for i in range(n)], name=f"C{n}")


def sphere(n: int) -> AbsoluteComplex:
    """Boundary of the (n+1)-simplex: an n-sphere on n+2 vertices."""
    return build_simplicial(combinations(range(n + 2), n + 1), name=f"S{n}")


def octahedron() -> AbsoluteComplex:
    return build_simplicial(OCTAHEDRON_FACETS, name="octahedron")


def rp2() -> AbsoluteComplex:
    return build_simplicial(RP2_FACETS, name="RP2_6")


def torus() -> AbsoluteComplex:
    """Seven-vertex (Csaszar / Moebius) torus."""
    facets = []
    for i in range(7):
        facets.append((i, (i + 1) % 7, (i + 3) % 7))
        facets.append((i, (i + 2) % 7, (i + 3) % 7))
    return build_simplicial(facets, name="torus7")


def cp2() -> AbsoluteComplex:
    return build_simplicial(CP2_FACETS, name="CP2_9")


def cone(facets, apex) -> AbsoluteComplex:
    return build_simplicial([list(f) + [apex] for f in facets], name="cone")


def disc(n: int = 2) -> AbsoluteComplex:
    """Triangulated n-disc: cone over the boundary of an n-simplex."""
    return cone(combinations(range(n + 1), n), n + 1)


def cylinder(length: int, around: int = 6) -> AbsoluteComplex:
    """Triangulated cylinder S^1_around x [0, length].

    Vertex ``j * around + i`` sits at angle i, height j, so ids are stable as
    ``length`` grows and the family is nested.
    """
    facets = []
    for j in range(length):
        for i in range(around):
            a = j * around + i
            b = j * around + (i + 1) % around
            c = (j + 1) * around + i
            d = (j + 1) * around + (i + 1) % around
            facets.append((a, b, d))
            facets.append((a, c, d))
    return build_simplicial(facets, name=f"cylinder{around}x{length}")


def disjoint_triangles(count: int) -> AbsoluteComplex:
    return build_simplicial(
        [[3 * k, 3 * k + 1, 3 * k + 2] for k in range(count)], name=f"{count}triangles"
    )


def all_closed_fixtures() -> dict[str, AbsoluteComplex]:
    return {
        "C3": circle(3),
        "S2": octahedron(),
        "RP2": rp2(),
        "torus": torus(),
        "CP2": cp2(),
    }


def all_fixtures() -> dict[str, AbsoluteComplex]:
    out = {"edge": edge(), "triangle": triangle()}
    out.update(all_closed_fixtures())
    return out


# ---------------------------------------------------------------------------
# geometric fixtures


def triangular_patch(rows: int = 3, cols: int = 4, side: float = 1.0) -> GeometricComplex:
    """Roughly rectangular patch of the equilateral triangular lattice."""
    h = side * math.sqrt(3) / 2
    coords = {}
    vid = {}
    for r in range(rows + 1):
        off = side / 2 if r % 2 else 0.0
        for c in range(cols + 1):
            k = r * (cols + 1) + c
            vid[(r, c)] = k
            coords[k] = (c * side + off, r * h)
    facets = []
    for r in range(rows):
        for c in range(cols + 1):
            lo = vid[(r, c)]
            hi = vid[(r + 1, c)]
            if r % 2 == 0:
                if c + 1 <= cols:
                    facets.append((lo, vid[(r, c + 1)], hi))
                if c >= 1:
                    facets.append((lo, hi, vid[(r + 1, c - 1)]))
            else:
                if c + 1 <= cols:
                    facets.append((lo, vid[(r, c + 1)], vid[(r + 1, c + 1)]))
                    facets.append((lo, hi, vid[(r + 1, c + 1)]))
    return GeometricComplex(build_simplicial(facets, name="triangular_patch"), coords)


def sliver_square(height: float = 0.002) -> GeometricComplex:
    """Unit square fanned from a point just above the bottom edge."""
    coords = {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (1.0, 1.0), 3: (0.0, 1.0), 4: (0.5, height)}
    facets = [(0, 1, 4), (1, 2, 4), (2, 3, 4), (0, 3, 4)]
    return GeometricComplex(build_simplicial(facets, name="sliver_square"), coords)


# ---------------------------------------------------------------------------
# manifold pairs


def boundary_identity(core) -> dict:
    from .duality import boundary_cells

    return {c: c for c in boundary_cells(core)}


def cp2_pair():
    """(CP^2 minus its last 4-simplex, that simplex): glues back to CP^2_9.

    Keeping the first 4-simplex in core1 makes the default orientation of
    core1 the restriction of the default fundamental cycle of CP^2_9.
    """
    from .duality import ManifoldPairDescription, fundamental_cycle

    whole = cp2()
    z = fundamental_cycle(whole)
    tops = whole.cells(4)
    disc_facet = tuple(whole.verts[tops[-1]])
    core1 = build_simplicial([tuple(whole.verts[c]) for c in tops[:-1]], name="CP2-disc")
    core0 = build_simplicial([disc_facet], name="D4")
    o1 = type(z)(4, {c: z[c] for c in core1.cells(4)})
    return ManifoldPairDescription(core1, core0, boundary_identity(core0), o1, "CP2 pair")


def trivial_pair(core=None):
    """(K, K, id); the glued complex is the double of K."""
    from .duality import ManifoldPairDescription

    core = core if core is not None else simplex(4)
    return ManifoldPairDescription(core, core, boundary_identity(core), None, f"double({core.name})")


def disc_pair():
    """Two triangulated 2-discs glued along C3."""
    from .duality import ManifoldPairDescription

    d1 = build_simplicial([(0, 1, 3), (1, 2, 3), (0, 2, 3)], name="D2")
    d0 = build_simplicial([(0, 1, 4), (1, 2, 4), (0, 2, 4)], name="D2'")
    from .duality import boundary_cells

    ident = {c: c for c in boundary_cells(d1)}
    return ManifoldPairDescription(d1, d0, ident, None, "disc pair")
