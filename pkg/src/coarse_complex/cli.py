"""Command-line front end.

Exit codes: 0 success, 2 invalid input or usage, 1 internal error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .complex import AbsoluteComplex, ComplexError
from .geometry import GeometricComplex, uniformity_check
from .io import (
    ParseError,
    load_chain,
    load_glue,
    load_numbers,
    load_operator,
    parse_complex_file,
    parse_metric_file,
)
from .metric import MetricError

SCHEMA_VERSION = 1

COMMANDS = (
    "betti", "spectrum", "hodge", "gap-trend", "gh", "dl", "dltop", "hausdorff",
    "classify-map", "subdivide-check", "locality", "pair-signature", "duality-check",
    "bordism-compare", "uniformity-check",
)


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    q: int | None = None
    p: float = 2.0
    tol: float = 1e-8
    sizes: list = field(default_factory=list)
    json: bool = False
    seed: int = 0
    options: dict = field(default_factory=dict)
    timings: bool = False


def jsonable(v):
    """Convert results to JSON-ready values; Fractions become "p/q" strings."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.ndarray):
        return [jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        items = sorted(v, key=str) if isinstance(v, (set, frozenset)) else v
        return [jsonable(x) for x in items]
    return str(v)


def _complex(path) -> AbsoluteComplex:
    K = parse_complex_file(path)
    return K.complex if isinstance(K, GeometricComplex) else K


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# command implementations: each returns (result dict, human-readable text)


def cmd_betti(cfg: RunConfig):
    from .hodge import P_NOTE, betti

    K = _complex(cfg.inputs["complex"])
    qs = [cfg.q] if cfg.q is not None else list(range(K.dimension + 1))
    values = {q: betti(K, q, cfg.p) for q in qs}
    result = {"betti": values if cfg.q is None else values[cfg.q]}
    if cfg.p != 2:
        result["note"] = P_NOTE
    text = str(values[cfg.q]) if cfg.q is not None else " ".join(str(values[q]) for q in qs)
    return result, text


def cmd_spectrum(cfg: RunConfig):
    from .hodge import spectral_gap, spectrum

    K = _complex(cfg.inputs["complex"])
    q = cfg.q if cfg.q is not None else 0
    spec = spectrum(K, q, cfg.tol, seed=cfg.seed)
    gap = spectral_gap(K, q, cfg.tol, seed=cfg.seed)
    eig = [round(float(x), 12) + 0.0 for x in spec.eigenvalues]
    result = {"eigenvalues": eig, "gap": gap.value, "kernel_dim": spec.kernel_dim,
              "norm": spec.norm, "empty": gap.empty}
    text = "eigenvalues: " + " ".join(f"{x:.10g}" for x in eig) + f"\ngap: {gap.value:.10g}"
    return result, text


def cmd_hodge(cfg: RunConfig):
    from .hodge import hodge_decompose

    K = _complex(cfg.inputs["complex"])
    c = load_chain(cfg.inputs["chain"], K)
    q = cfg.q if cfg.q is not None else c.degree
    H = hodge_decompose(K, q, c)
    parts = {
        name: {cell: float(getattr(H, name)[cell]) for cell in K.cells(q) if getattr(H, name)[cell]}
        for name in ("harmonic", "exact", "coexact")
    }
    result = {**parts, "residuals": H.residuals}
    text = "\n".join(f"{k}: {json.dumps(jsonable(v), sort_keys=True)}" for k, v in parts.items())
    return result, text


def cmd_gap_trend(cfg: RunConfig):
    from .hodge import FAMILIES, gap_trend

    name = cfg.options.get("family")
    if name not in FAMILIES:
        raise UsageError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    fam = FAMILIES[name]()
    q = cfg.q if cfg.q is not None else 1
    tr = gap_trend(fam, q, cfg.sizes, cfg.tol)
    result = {"family": tr.description, "sizes": tr.sizes, "gaps": tr.gaps, "verdict": tr.verdict,
              "strictly_decreasing": tr.strictly_decreasing, "heuristic": True, "note": tr.note}
    lines = [f"N={n}: gap {g:.10g}" for n, g in zip(tr.sizes, tr.gaps)]
    lines.append(f"verdict: {tr.verdict} (heuristic)")
    return result, "\n".join(lines)


def _spaces(cfg):
    return parse_metric_file(cfg.inputs["X"]), parse_metric_file(cfg.inputs["Y"])


def cmd_gh(cfg: RunConfig):
    from .metric import admissible_extension, gh_distance

    X, Y = _spaces(cfg)
    iv = gh_distance(X, Y, Fraction(cfg.tol))
    ext = admissible_extension(X, Y, iv.correspondence, iv.upper)
    result = {"lower": iv.lower, "upper": iv.upper, "lower_float": float(iv.lower),
              "upper_float": float(iv.upper), "iterations": iv.iterations,
              "correspondence": iv.correspondence, "extension": ext.cross}
    return result, f"[{float(iv.lower):.12g}, {float(iv.upper):.12g}]"


def cmd_dl(cfg: RunConfig):
    from .metric import lipschitz_witness

    X, Y = _spaces(cfg)
    w = lipschitz_witness(X, Y, int(cfg.options.get("max_size") or 4))
    result = {"value": w.value, "phi": w.phi, "psi": w.psi, "dil_phi": w.dil_phi,
              "dil_psi": w.dil_psi, "displacement": w.displacement}
    return result, f"{w.value:.12g}"


def cmd_dltop(cfg: RunConfig):
    from .metric import lipschitz_top_witness

    X, Y = _spaces(cfg)
    w = lipschitz_top_witness(X, Y)
    if w is None:
        return {"value": math.inf, "bijection": None}, "inf"
    return {"value": w.value, "bijection": w.phi, "dil": w.dil_phi, "dil_inverse": w.dil_psi}, f"{w.value:.12g}"


def cmd_hausdorff(cfg: RunConfig):
    from .metric import hausdorff_distance

    M = parse_metric_file(cfg.inputs["space"])
    xs, ys = _ints(cfg.options.get("x") or ""), _ints(cfg.options.get("y") or "")
    for i in xs + ys:
        if not 0 <= i < len(M):
            raise UsageError(f"point {i} is not in the space")
    d = hausdorff_distance(M, xs, ys)
    return {"value": d, "value_float": float(d)}, str(d)


def cmd_classify_map(cfg: RunConfig):
    from .metric import MetricMap, classify_map

    X, Y = _spaces(cfg)
    f = MetricMap(X, Y, _ints(cfg.options.get("map") or ""))
    c = classify_map(f)
    result = {"semilinear_constant": c.semilinear_constant, "expansion": c.expansion,
              "dilatation": c.dilatation}
    text = f"C: {c.semilinear_constant}\ndil: {c.dilatation}"
    return result, text


def cmd_subdivide_check(cfg: RunConfig):
    from .subdivision import subdivision_pipeline

    K = _complex(cfg.inputs["complex"])
    r = subdivision_pipeline(K)
    result = {"zeta_iso": r.zeta_iso, "theta_chain_map": r.theta_chain_map, "theta_mono": r.theta_mono,
              "eta_theta_id": r.eta_theta_id, "betti_equal": r.betti_equal,
              "theta_homology_injective": r.theta_homology_injective,
              "betti": r.betti_K, "betti_subdivided": r.betti_sub, "passed": r.passed}
    keys = ("zeta_iso", "theta_chain_map", "theta_mono", "eta_theta_id", "betti_equal")
    text = "\n".join(f"{k}: {'pass' if result[k] else 'FAIL'}" for k in keys)
    return result, text


def cmd_locality(cfg: RunConfig):
    from .operators import classify_locality

    K = _complex(cfg.inputs["complex"])
    L = _complex(cfg.inputs["target"]) if cfg.inputs.get("target") else K
    T = load_operator(cfg.inputs["operator"], K, L)
    radius = int(cfg.options.get("radius") if cfg.options.get("radius") is not None else 1)
    r = classify_locality(T, K, L, radius)
    result = {"vicinality": r.vicinality, "entry_bound": r.entry_bound, "local_radius": r.local_radius,
              "nearly_local_constant": r.nearly_local_constant, "norm_bound": r.norm_bound,
              "conditions": r.conditions, "violation": r.violation, "status": r.status}
    text = (f"vicinality: {r.vicinality}\nlocal radius: {r.local_radius}\n"
            f"nearly local constant: {r.nearly_local_constant}\nstatus: {r.status}")
    return result, text


def _pair(core1, core0, glue):
    from .duality import ManifoldPairDescription

    return ManifoldPairDescription(_complex(core1), _complex(core0), load_glue(glue))


def cmd_pair_signature(cfg: RunConfig):
    from .duality import glue_pair_oriented, intersection_form

    P = _pair(cfg.inputs["core1"], cfg.inputs["core0"], cfg.inputs["glue"])
    G, z = glue_pair_oriented(P)
    form = intersection_form(G, z)
    return {"signature": form.signature, "form": form.matrix, "glued_f_vector": G.f_vector()}, str(form.signature)


def cmd_duality_check(cfg: RunConfig):
    from .duality import poincare_duality_check

    K = _complex(cfg.inputs["complex"])
    r = poincare_duality_check(K)
    result = {"betti": r.betti, "symmetric": r.symmetric, "cap_ranks": r.cap_ranks, "passed": r.passed}
    return result, f"betti: {r.betti}\ncap ranks: {r.cap_ranks}\n{'pass' if r.passed else 'FAIL'}"


def cmd_bordism_compare(cfg: RunConfig):
    from .duality import cs_bordism_compare

    A = _pair(cfg.inputs["a_core1"], cfg.inputs["a_core0"], cfg.inputs["a_glue"])
    B = _pair(cfg.inputs["b_core1"], cfg.inputs["b_core0"], cfg.inputs["b_glue"])
    na = load_numbers(cfg.inputs["numbers_a"]) if cfg.inputs.get("numbers_a") else []
    nb = load_numbers(cfg.inputs["numbers_b"]) if cfg.inputs.get("numbers_b") else []
    v = cs_bordism_compare(A, B, na, nb)
    result = {"verdict": v.verdict, "invariants_a": v.invariants_a, "invariants_b": v.invariants_b,
              "differing": v.differing, "note": v.note}
    return result, v.verdict


def cmd_uniformity_check(cfg: RunConfig):
    G = parse_complex_file(cfg.inputs["complex"])
    if not isinstance(G, GeometricComplex):
        raise UsageError("uniformity-check needs a file with vertex coordinates")
    o = cfg.options
    r = uniformity_check(G, o["theta0"], o["c1"], o["c2"], o["c"])
    result = {"passed": r.passed, "conditions": r.conditions, "extremes": r.extremes}
    text = "\n".join(f"{k}): {'pass' if v['pass'] else 'FAIL'} (worst {v['worst']}, at {v['witness']})"
                     for k, v in r.conditions.items())
    return result, text


HANDLERS = {
    "betti": cmd_betti, "spectrum": cmd_spectrum, "hodge": cmd_hodge, "gap-trend": cmd_gap_trend,
    "gh": cmd_gh, "dl": cmd_dl, "dltop": cmd_dltop, "hausdorff": cmd_hausdorff,
    "classify-map": cmd_classify_map, "subdivide-check": cmd_subdivide_check,
    "locality": cmd_locality, "pair-signature": cmd_pair_signature,
    "duality-check": cmd_duality_check, "bordism-compare": cmd_bordism_compare,
    "uniformity-check": cmd_uniformity_check,
}


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    def global_flags(p, default):
        # accepted before or after the command name
        p.add_argument("--json", action="store_true", default=default(False), help="emit one JSON object")
        p.add_argument("--tol", type=float, default=default(1e-8))
        p.add_argument("--seed", type=int, default=default(0))
        p.add_argument("--timings", action="store_true", default=default(False),
                       help="include wall-clock timings in JSON")

    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, lambda v: argparse.SUPPRESS)
    parser = _Parser(prog="coarse-complex", description="Finite metric spaces, L_p cohomology and manifold-pair invariants.")
    parser.add_argument("--version", action="version", version=__version__)
    global_flags(parser, lambda v: v)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("betti", "Betti numbers by exact rank")
    p.add_argument("--q", type=int)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("complex")
    p = add("spectrum", "Laplacian eigenvalues and spectral gap")
    p.add_argument("--q", type=int, default=0)
    p.add_argument("complex")
    p = add("hodge", "Hodge decomposition of a cochain")
    p.add_argument("--q", type=int)
    p.add_argument("--chain", required=True)
    p.add_argument("complex")
    p = add("gap-trend", "spectral gaps along an exhaustion family (heuristic)")
    p.add_argument("--family", required=True)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--sizes", required=True)
    for name, help_text in (("gh", "Gromov-Hausdorff distance interval"), ("dl", "Lipschitz distance d_L"),
                            ("dltop", "bi-Lipschitz distance d_L,top")):
        p = add(name, help_text)
        p.add_argument("X")
        p.add_argument("Y")
        if name == "dl":
            p.add_argument("--max-size", type=int, default=4)
    p = add("hausdorff", "Hausdorff distance between point subsets")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("space")
    p = add("classify-map", "constants of a map between metric spaces")
    p.add_argument("--map", required=True, help="image index of each source point, comma separated")
    p.add_argument("X")
    p.add_argument("Y")
    p = add("subdivide-check", "barycentric subdivision pipeline")
    p.add_argument("complex")
    p = add("locality", "vicinal / local / nearly-local classification")
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--operator", required=True)
    p.add_argument("--target")
    p.add_argument("complex")
    p = add("pair-signature", "signature of a glued manifold pair")
    p.add_argument("--core1", required=True)
    p.add_argument("--core0", required=True)
    p.add_argument("--glue", required=True)
    p = add("duality-check", "Poincare duality by exact ranks")
    p.add_argument("complex")
    p = add("bordism-compare", "compare pair invariants")
    for side in ("a", "b"):
        for part in ("core1", "core0", "glue"):
            p.add_argument(f"--{side}-{part}", required=True)
        p.add_argument(f"--numbers-{side}")
    p = add("uniformity-check", "uniform triangulation conditions")
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--c1", type=float, required=True)
    p.add_argument("--c2", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("complex")
    return parser


INPUT_KEYS = ("complex", "chain", "X", "Y", "space", "operator", "target", "core1", "core0", "glue",
              "a_core1", "a_core0", "a_glue", "b_core1", "b_core0", "b_glue", "numbers_a", "numbers_b")
OPTION_KEYS = ("family", "max_size", "x", "y", "map", "radius", "theta0", "c1", "c2", "c")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.tol <= 0:
        raise UsageError("--tol must be positive")
    inputs = {k: getattr(ns, k) for k in INPUT_KEYS if getattr(ns, k, None) is not None}
    options = {k: getattr(ns, k) for k in OPTION_KEYS if getattr(ns, k, None) is not None}
    sizes = _ints(ns.sizes) if getattr(ns, "sizes", None) else []
    return RunConfig(ns.command, inputs, getattr(ns, "q", None), getattr(ns, "p", 2.0), ns.tol,
                     sizes, ns.json, ns.seed, options, ns.timings)


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    t0 = time.perf_counter()
    try:
        result, text = HANDLERS[cfg.command](cfg)
    except (ParseError, UsageError, MetricError, ComplexError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    except Exception as exc:  # pragma: no cover - reported as an internal error
        print(f"internal error: {type(exc).__name__}: {exc}", file=err)
        return 1
    elapsed = time.perf_counter() - t0
    if cfg.json:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": cfg.command,
            "inputs": cfg.inputs,
            "result": result,
            "tolerances": {"tol": cfg.tol, "p": cfg.p, "seed": cfg.seed},
            "timings": {"total_seconds": elapsed} if cfg.timings else {},
        }
        print(json.dumps(jsonable(doc), sort_keys=True), file=out)
    else:
        print(text, file=out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            parser.print_usage(sys.stderr)
            return 2
        cfg = config_from_args(ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
