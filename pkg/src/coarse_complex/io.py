"""Readers for metric files (.ms), complex files (.cx) and the JSON inputs.

Every parse error carries the line number it refers to.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .chains import CellOperator, SparseChain
from .complex import AbsoluteComplex, ComplexError, build_simplicial, validate_incidence
from .geometry import GeometricComplex
from .metric import TRIANGLE_TOL, FiniteMetricSpace


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line
        self.path = path


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s and not s.startswith("#"):
            yield no, s


def _number(tok: str, line: int, path) -> Fraction:
    try:
        v = Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a number: {tok!r}", line, path) from None
    return v


# ---------------------------------------------------------------------------
# metric spaces


def parse_metric_text(text: str, path: str | None = None) -> FiniteMetricSpace:
    it = _lines(text)
    try:
        no, first = next(it)
    except StopIteration:
        raise ParseError("empty metric file", 1, path) from None
    try:
        n = int(first)
    except ValueError:
        raise ParseError(f"expected a point count, got {first!r}", no, path) from None
    if n < 1:
        raise ParseError("point count must be positive", no, path)
    rows, where = [], []
    for no, s in it:
        toks = s.split()
        if len(toks) != n:
            raise ParseError(f"expected {n} entries, found {len(toks)}", no, path)
        row = [_number(t, no, path) for t in toks]
        if any(v < 0 for v in row):
            raise ParseError("negative distance", no, path)
        rows.append(row)
        where.append(no)
        if len(rows) > n:
            raise ParseError(f"more than {n} matrix rows", no, path)
    if len(rows) != n:
        raise ParseError(f"expected {n} matrix rows, found {len(rows)}", where[-1] if where else no, path)
    for i in range(n):
        if rows[i][i] != 0:
            raise ParseError(f"nonzero diagonal entry at point {i}", where[i], path)
        for j in range(i + 1, n):
            if abs(rows[i][j] - rows[j][i]) > TRIANGLE_TOL:
                raise ParseError(f"asymmetric entries ({i},{j}) and ({j},{i})", where[j], path)
            if rows[i][j] == 0:
                raise ParseError(f"distinct points {i} and {j} at distance 0", where[i], path)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if rows[i][k] - rows[i][j] - rows[j][k] > TRIANGLE_TOL:
                    raise ParseError(
                        f"triangle inequality fails for ({i},{j},{k}): "
                        f"d({i},{k}) > d({i},{j}) + d({j},{k})",
                        where[i], path,
                    )
    return FiniteMetricSpace(rows)


def parse_metric_file(path) -> FiniteMetricSpace:
    p = Path(path)
    return parse_metric_text(p.read_text(), str(p))


def format_metric(X: FiniteMetricSpace) -> str:
    out = [str(len(X))]
    for row in X.dist:
        out.append(" ".join(str(v) for v in row))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# complexes


def _vertex(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def parse_complex_text(text: str, path: str | None = None):
    """AbsoluteComplex, or GeometricComplex when ``vertex`` lines are present."""
    facets, facet_lines = [], []
    cells, cell_lines = [], {}
    incs = []
    coords, coord_line = {}, {}
    for no, s in _lines(text):
        toks = s.split()
        kind = toks[0]
        if kind == "simplex":
            if cells or incs:
                raise ParseError("simplex lines mixed with cell/inc lines", no, path)
            if len(toks) < 2:
                raise ParseError("simplex line without vertices", no, path)
            verts = [_vertex(t) for t in toks[1:]]
            if len(set(verts)) != len(verts):
                raise ParseError("repeated vertex in simplex", no, path)
            facets.append(verts)
            facet_lines.append(no)
        elif kind == "cell":
            if facets:
                raise ParseError("cell lines mixed with simplex lines", no, path)
            if len(toks) != 3:
                raise ParseError("expected 'cell <id> <dim>'", no, path)
            try:
                d = int(toks[2])
            except ValueError:
                raise ParseError(f"bad dimension {toks[2]!r}", no, path) from None
            if toks[1] in cell_lines:
                raise ParseError(f"duplicate cell {toks[1]!r}", no, path)
            cells.append((toks[1], d))
            cell_lines[toks[1]] = no
        elif kind == "inc":
            if facets:
                raise ParseError("inc lines mixed with simplex lines", no, path)
            if len(toks) != 4:
                raise ParseError("expected 'inc <face> <coface> <int>'", no, path)
            try:
                e = int(toks[3])
            except ValueError:
                raise ParseError(f"incidence must be an integer, got {toks[3]!r}", no, path) from None
            incs.append((toks[1], toks[2], e, no))
        elif kind == "vertex":
            if len(toks) < 3:
                raise ParseError("expected 'vertex <id> <x1> ...'", no, path)
            v = _vertex(toks[1])
            try:
                coords[v] = [float(t) for t in toks[2:]]
            except ValueError:
                raise ParseError("bad coordinate", no, path) from None
            coord_line[v] = no
        else:
            raise ParseError(f"unknown line type {kind!r}", no, path)

    if facets:
        K = build_simplicial(facets, name=Path(path).stem if path else "")
        if coords:
            missing = [v for v in K.vertex_labels() if v not in coords]
            if missing:
                raise ParseError(f"no vertex line for {missing[0]!r}", facet_lines[0], path)
            dims = {len(c) for c in coords.values()}
            if len(dims) > 1:
                v = max(coords, key=lambda v: coord_line[v])
                raise ParseError("vertex coordinates have mixed lengths", coord_line[v], path)
            return GeometricComplex(K, coords)
        return K
    if coords:
        raise ParseError("vertex lines need simplex lines", min(coord_line.values()), path)
    if not cells:
        raise ParseError("no cells", 1, path)
    inc = {}
    line_of = {}
    dims = dict(cells)
    for x, y, e, no in incs:
        for c in (x, y):
            if c not in cell_lines:
                raise ParseError(f"incidence references unknown cell {c!r}", no, path)
        if dims[y] != dims[x] + 1:
            raise ParseError(f"incidence ({x}, {y}) does not raise dimension by one", no, path)
        inc[(x, y)] = inc.get((x, y), 0) + e
        line_of[(x, y)] = no
    try:
        K = AbsoluteComplex(cells, inc, name=Path(path).stem if path else "")
    except ComplexError as exc:
        raise ParseError(str(exc), 1, path) from None
    rep = validate_incidence(K)
    if not rep.passed:
        x, y, total = rep.failures[0]
        no = max(n for (a, b), n in line_of.items() if b == y)
        raise ParseError(f"incidence condition fails for pair ({x}, {y}): sum {total}", no, path)
    return K


def parse_complex_file(path):
    p = Path(path)
    return parse_complex_text(p.read_text(), str(p))


def format_complex(K: AbsoluteComplex) -> str:
    if K.is_simplicial:
        tops = [c for c in K.cells() if not K.covers_of(c)]
        return "".join("simplex " + " ".join(str(v) for v in K.verts[c]) + "\n" for c in tops)
    out = [f"cell {c} {K.dim(c)}" for c in K.cells()]
    out += [f"inc {x} {y} {e}" for (x, y), e in K.incidence.items()]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# JSON inputs


def _load_json(path):
    p = Path(path)
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, str(p)) from None


def _scalar(v, path):
    if isinstance(v, bool):
        raise ParseError(f"boolean is not a coefficient: {v!r}", 1, path)
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            f = Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad coefficient {v!r}", 1, path) from None
        return int(f) if f.denominator == 1 else f
    raise ParseError(f"bad coefficient {v!r}", 1, path)


def chain_from_json(data, K: AbsoluteComplex | None = None, path=None) -> SparseChain:
    if not isinstance(data, dict) or "degree" not in data:
        raise ParseError("chain JSON needs 'degree' and 'coeffs'", 1, path)
    q = int(data["degree"])
    coeffs = {str(k): _scalar(v, path) for k, v in data.get("coeffs", {}).items()}
    if K is not None:
        for c in coeffs:
            if c not in K or K.dim(c) != q:
                raise ParseError(f"cell {c!r} is not a {q}-cell of the complex", 1, path)
    return SparseChain(q, coeffs, float(data.get("p", 2.0)))


def load_chain(path, K: AbsoluteComplex | None = None) -> SparseChain:
    return chain_from_json(_load_json(path), K, str(path))


def operator_from_json(data, K_src: AbsoluteComplex, K_tgt: AbsoluteComplex, path=None) -> CellOperator:
    """Sparse triplets (target-cell, source-cell, value) plus degrees."""
    try:
        sd, td = int(data["source_degree"]), int(data["target_degree"])
        triplets = data["entries"]
    except (KeyError, TypeError, ValueError):
        raise ParseError("operator JSON needs source_degree, target_degree and entries", 1, path) from None
    rows, cols = K_tgt.cells(td), K_src.cells(sd)
    rpos = {c: i for i, c in enumerate(rows)}
    cpos = {c: j for j, c in enumerate(cols)}
    entries = {}
    for k, t in enumerate(triplets):
        if not isinstance(t, (list, tuple)) or len(t) != 3:
            raise ParseError(f"entry {k} is not a (target, source, value) triplet", 1, path)
        r, c, v = str(t[0]), str(t[1]), _scalar(t[2], path)
        if r not in rpos:
            raise ParseError(f"entry {k}: {r!r} is not a {td}-cell of the target", 1, path)
        if c not in cpos:
            raise ParseError(f"entry {k}: {c!r} is not a {sd}-cell of the source", 1, path)
        entries[(rpos[r], cpos[c])] = entries.get((rpos[r], cpos[c]), 0) + v
    return CellOperator(sd, td, rows, cols, entries)


def load_operator(path, K_src, K_tgt) -> CellOperator:
    return operator_from_json(_load_json(path), K_src, K_tgt, str(path))


def operator_to_json(T: CellOperator) -> dict:
    return {
        "source_degree": T.source_degree,
        "target_degree": T.target_degree,
        "entries": [[T.rows[i], T.cols[j], v] for (i, j), v in sorted(T.entries.items())],
    }


def load_glue(path) -> dict:
    """Boundary identification: list of [core1-cell, core0-cell] pairs."""
    data = _load_json(path)
    pairs = data.get("pairs") if isinstance(data, dict) else data
    if not isinstance(pairs, list):
        raise ParseError("glue JSON must be a list of [core1-cell, core0-cell] pairs", 1, str(path))
    out = {}
    for k, p in enumerate(pairs):
        if not isinstance(p, (list, tuple)) or len(p) != 2:
            raise ParseError(f"glue entry {k} is not a pair", 1, str(path))
        a, b = str(p[0]), str(p[1])
        if a in out:
            raise ParseError(f"cell {a!r} identified twice", 1, str(path))
        out[a] = b
    return out


def load_numbers(path):
    """Characteristic-number input.

    ``{"classes": {name: {"degree", "ring", "coeffs"}}, "numbers": [poly, ...]}``
    where a poly is a list of monomials and a monomial a list of [name, exponent].
    """
    from .duality import CocycleClass

    data = _load_json(path)
    try:
        classes = {
            name: CocycleClass(
                int(c["degree"]),
                SparseChain(int(c["degree"]), {str(k): _scalar(v, str(path)) for k, v in c.get("coeffs", {}).items()}),
                c.get("ring", "rational"),
            )
            for name, c in data["classes"].items()
        }
        numbers = [
            [[(classes[f[0]], int(f[1])) for f in mono] for mono in poly]
            for poly in data["numbers"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad characteristic-number JSON: {exc}", 1, str(path)) from None
    return numbers
