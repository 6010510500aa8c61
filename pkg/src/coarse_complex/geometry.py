"""Geometric simplicial complexes and the uniform-triangulation conditions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .complex import AbsoluteComplex, ComplexError


@dataclass
class GeometricComplex:
    """A simplicial complex with a coordinate vector per vertex label."""

    complex: AbsoluteComplex
    coords: dict

    def __post_init__(self):
        if not self.complex.is_simplicial:
            raise ComplexError("geometric complexes must be simplicial")
        missing = [v for v in self.complex.vertex_labels() if v not in self.coords]
        if missing:
            raise ComplexError(f"no coordinates for vertices {missing}")
        self.coords = {v: np.asarray(p, dtype=float) for v, p in self.coords.items()}
        dims = {p.shape for p in self.coords.values()}
        if len(dims) > 1:
            raise ComplexError("vertex coordinates have mixed lengths")

    def points(self, cell: str) -> np.ndarray:
        return np.array([self.coords[v] for v in self.complex.verts[cell]])


def simplex_volume(points) -> float:
    """k-dimensional volume of the simplex spanned by k+1 points (Gram determinant)."""
    pts = np.asarray(points, dtype=float)
    k = len(pts) - 1
    if k <= 0:
        return 1.0 if k == 0 else 0.0
    E = (pts[1:] - pts[0]).T
    gram = E.T @ E
    det = float(np.linalg.det(gram))
    if det <= 0.0:
        return 0.0
    return math.sqrt(det) / math.factorial(k)


def diameter(points) -> float:
    pts = np.asarray(points, dtype=float)
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, float(np.linalg.norm(pts[i] - pts[j])))
    return best


def fullness(points, n: int | None = None) -> float:
    """vol / diam**n for a simplex given by its vertex coordinates.

    ``n`` defaults to the simplex dimension.  Degenerate simplices give 0.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        raise ValueError("simplex has no vertices")
    if n is None:
        n = len(pts) - 1
    if n == 0:
        return 1.0
    vol = simplex_volume(pts)
    diam = diameter(pts)
    if vol == 0.0 or diam == 0.0:
        return 0.0
    return vol / diam**n


def barycentric_gradient_bound(points) -> float:
    """Largest gradient norm among the barycentric coordinate functions.

    Gradients are taken inside the simplex's affine hull; infinite for a
    degenerate simplex.
    """
    pts = np.asarray(points, dtype=float)
    E = (pts[1:] - pts[0]).T
    gram = E.T @ E
    if abs(np.linalg.det(gram)) < 1e-300:
        return math.inf
    G = np.linalg.solve(gram, E.T)
    grads = np.vstack([-G.sum(axis=0), G])
    return float(np.max(np.linalg.norm(grads, axis=1)))


@dataclass
class UniformityReport:
    passed: bool
    conditions: dict = field(default_factory=dict)
    extremes: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "conditions": self.conditions, "extremes": self.extremes}


def uniformity_check(G: GeometricComplex, theta0: float, c1: float, c2: float, c: float) -> UniformityReport:
    """Check fullness > theta0, c2 <= vol <= c1 and |grad phi_v| <= c.

    Each condition reports pass/fail and the worst simplex as witness.  The
    gradient bound of a vertex is the max over top simplices containing it.
    """
    K = G.complex
    n = K.dimension
    if n < 0:
        empty = {"pass": True, "witness": None, "worst": None}
        return UniformityReport(True, {"a": dict(empty), "b": dict(empty), "c": dict(empty)}, {})
    if not K.is_pure():
        raise ComplexError("uniformity check needs a pure complex")
    tops = K.cells(n)
    fulls = {s: fullness(G.points(s), n) for s in tops}
    vols = {s: simplex_volume(G.points(s)) for s in tops}
    grad_simplex = {s: barycentric_gradient_bound(G.points(s)) for s in tops}
    grad_vertex = {}
    for s in tops:
        for v in K.verts[s]:
            grad_vertex[v] = max(grad_vertex.get(v, 0.0), grad_simplex[s])

    worst_full = min(tops, key=lambda s: (fulls[s], s))
    a_ok = all(f > theta0 for f in fulls.values())
    lo = min(tops, key=lambda s: (vols[s], s))
    hi = max(tops, key=lambda s: (vols[s], s))
    b_ok = all(c2 <= v <= c1 for v in vols.values())
    b_witness = lo if vols[lo] < c2 else hi
    worst_v = max(grad_vertex, key=lambda v: (grad_vertex[v], str(v)))
    c_ok = all(g <= c for g in grad_vertex.values())
    conditions = {
        "a": {"pass": a_ok, "witness": worst_full, "worst": fulls[worst_full]},
        "b": {"pass": b_ok, "witness": b_witness, "worst": vols[b_witness]},
        "c": {"pass": c_ok, "witness": worst_v, "worst": grad_vertex[worst_v]},
    }
    extremes = {
        "min_fullness": fulls[worst_full],
        "min_volume": vols[lo],
        "max_volume": vols[hi],
        "max_gradient": grad_vertex[worst_v],
    }
    return UniformityReport(a_ok and b_ok and c_ok, conditions, extremes)
