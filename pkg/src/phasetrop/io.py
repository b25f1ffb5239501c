"""Text formats for polynomials, CSV point clouds and JSON documents.

One term per line; ``#`` starts a comment.

* tropical: ``coeff : e1 ... en`` or a single ``max{x, y, x+y, -1}`` expression
* complex: ``re im : e1 ... en``
* Puiseux: ``(re,im)t^{p/q} + (re,im)t^{a} : e1 ... en``
* Viro family: ``re im @exponent : e1 ... en``
"""
from __future__ import annotations

import csv
import io as _io
import json
import re
from fractions import Fraction
from pathlib import Path

import numpy as np

from .amoeba import ComplexPolynomial, PointCloud, SpineResult, ViroFamily
from .puiseux import PuiseuxPolynomial, PuiseuxSeries
from .tropical import TropicalHypersurface, TropicalPolynomial


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int, source: str = "<input>"):
        super().__init__(f"{source}:{line}:{col}: {msg}")
        self.line, self.col, self.source = line, col, source


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield no, raw, body


def _number(tok: str, no: int, col: int, src: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad number {tok!r}", no, col, src) from None


def _split_term(body: str, no: int, src: str) -> tuple[str, tuple, int]:
    if ":" not in body:
        raise ParseError("expected ':' between coefficient and exponents", no, len(body.rstrip()) + 1, src)
    left, right = body.split(":", 1)
    col = len(left) + 2
    exps = []
    for m in re.finditer(r"\S+", right):
        tok = m.group()
        if not re.fullmatch(r"-?\d+", tok):
            raise ParseError(f"exponent must be an integer, got {tok!r}", no, col + m.start(), src)
        exps.append(int(tok))
    if not exps:
        raise ParseError("missing exponents", no, col, src)
    return left, tuple(exps), col


def _check_dims(terms: dict, no: int, alpha: tuple, src: str):
    if terms and len(next(iter(terms))) != len(alpha):
        raise ParseError(f"exponent has length {len(alpha)}, expected {len(next(iter(terms)))}", no, 1, src)
    if alpha in terms:
        raise ParseError(f"repeated exponent {alpha}", no, 1, src)


_VARS = {"x": 0, "y": 1, "z": 2}


def parse_max_expression(expr: str, no: int = 1, src: str = "<input>", offset: int = 0) -> TropicalPolynomial:
    """Parse ``max{c + sum k_i x_i, ...}`` with variables ``x, y, z`` or ``x1, x2, ...``."""
    m = re.fullmatch(r"\s*max\s*\{(.*)\}\s*", expr)
    if not m:
        raise ParseError("expected max{...}", no, offset + 1, src)
    inner_start = offset + expr.index("{") + 1
    body = m.group(1)
    pieces, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch == "," and depth == 0:
            pieces.append((start, body[start:i]))
            start = i + 1
    pieces.append((start, body[start:]))
    raw_terms = []
    nvars = 0
    tok_re = re.compile(r"\s*([+-]?)\s*(\d+(?:\.\d*)?(?:/\d+)?|\.\d+)?\s*\*?\s*(x\d+|[xyz])?\s*")
    for pstart, piece in pieces:
        if not piece.strip():
            raise ParseError("empty term", no, inner_start + pstart + 1, src)
        coef = Fraction(0)
        exps: dict[int, int] = {}
        pos = 0
        while pos < len(piece):
            mt = tok_re.match(piece, pos)
            if not mt or mt.end() == pos or (mt.group(2) is None and mt.group(3) is None):
                raise ParseError(f"cannot parse {piece[pos:].strip()!r}", no, inner_start + pstart + pos + 1, src)
            sign = -1 if mt.group(1) == "-" else 1
            if pos > 0 and not mt.group(1):
                raise ParseError("expected '+' or '-'", no, inner_start + pstart + pos + 1, src)
            num = Fraction(mt.group(2)) if mt.group(2) else Fraction(1)
            var = mt.group(3)
            if var is None:
                coef += sign * num
            else:
                idx = int(var[1:]) - 1 if len(var) > 1 else _VARS[var]
                if num.denominator != 1:
                    raise ParseError("exponents must be integers", no, inner_start + pstart + pos + 1, src)
                exps[idx] = exps.get(idx, 0) + sign * int(num)
                nvars = max(nvars, idx + 1)
            pos = mt.end()
        raw_terms.append((coef, exps, inner_start + pstart + 1))
    terms: dict = {}
    for coef, exps, col in raw_terms:
        alpha = tuple(exps.get(i, 0) for i in range(max(nvars, 1)))
        if alpha in terms:
            raise ParseError(f"repeated exponent {alpha}", no, col, src)
        terms[alpha] = coef
    return TropicalPolynomial(terms)


def parse_tropical(text: str, src: str = "<input>") -> TropicalPolynomial:
    lines = list(_lines(text))
    if not lines:
        raise ParseError("no terms", 1, 1, src)
    if len(lines) == 1 and "max" in lines[0][2]:
        no, raw, body = lines[0]
        return parse_max_expression(body, no, src)
    terms: dict = {}
    for no, raw, body in lines:
        left, alpha, col = _split_term(body, no, src)
        tok = left.strip()
        if not tok:
            raise ParseError("missing coefficient", no, 1, src)
        c = _number(tok, no, left.index(tok) + 1, src)
        _check_dims(terms, no, alpha, src)
        terms[alpha] = c
    return TropicalPolynomial(terms)


def _complex_pair(left: str, no: int, src: str) -> complex:
    toks = list(re.finditer(r"\S+", left))
    if len(toks) != 2:
        raise ParseError("expected 're im'", no, 1, src)
    parts = []
    for m in toks:
        try:
            parts.append(float(m.group()))
        except ValueError:
            raise ParseError(f"bad number {m.group()!r}", no, m.start() + 1, src) from None
    return complex(parts[0], parts[1])


def parse_complex(text: str, src: str = "<input>") -> ComplexPolynomial:
    terms: dict = {}
    for no, raw, body in _lines(text):
        left, alpha, _ = _split_term(body, no, src)
        if "@" in left:
            raise ParseError("'@exponent' belongs in a Viro family file", no, left.index("@") + 1, src)
        _check_dims(terms, no, alpha, src)
        terms[alpha] = _complex_pair(left, no, src)
    if not terms:
        raise ParseError("no terms", 1, 1, src)
    return ComplexPolynomial(terms)


def parse_viro(text: str, src: str = "<input>") -> ViroFamily:
    base, exps = {}, {}
    for no, raw, body in _lines(text):
        left, alpha, _ = _split_term(body, no, src)
        if "@" not in left:
            raise ParseError("missing '@exponent'", no, len(left.rstrip()) + 1, src)
        cpart, epart = left.split("@", 1)
        _check_dims(base, no, alpha, src)
        base[alpha] = _complex_pair(cpart, no, src)
        exps[alpha] = _number(epart.strip(), no, len(cpart) + 2, src)
    if not base:
        raise ParseError("no terms", 1, 1, src)
    return ViroFamily(base, exps)


_SERIES_TERM = re.compile(
    r"\s*\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)\s*(?:t\s*\^\s*(?:\{\s*([^{}]+?)\s*\}|(-?[\d/]+)))?\s*"
)


def parse_series(text: str, no: int = 1, src: str = "<input>", offset: int = 0) -> PuiseuxSeries:
    """``(re,im)t^{p/q} + ...``; a bare ``(re,im)`` is the constant term."""
    pos, terms = 0, []
    while pos < len(text):
        m = _SERIES_TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse series at {text[pos:].strip()!r}", no, offset + pos + 1, src)
        try:
            c = complex(float(m.group(1)), float(m.group(2)))
        except ValueError:
            raise ParseError("bad coefficient", no, offset + pos + 1, src) from None
        e = m.group(3) or m.group(4) or "0"
        terms.append((_number(e.replace(" ", ""), no, offset + pos + 1, src), c))
        pos = m.end()
        if pos < len(text):
            if text[pos] != "+":
                raise ParseError("expected '+' between series terms", no, offset + pos + 1, src)
            pos += 1
    if not terms:
        raise ParseError("empty series", no, offset + 1, src)
    return PuiseuxSeries.from_terms(terms)


def parse_puiseux(text: str, src: str = "<input>") -> PuiseuxPolynomial:
    terms: dict = {}
    for no, raw, body in _lines(text):
        left, alpha, _ = _split_term(body, no, src)
        _check_dims(terms, no, alpha, src)
        a = parse_series(left, no, src)
        if a.is_zero:
            raise ParseError("zero coefficient", no, 1, src)
        terms[alpha] = a
    if not terms:
        raise ParseError("no terms", 1, 1, src)
    return PuiseuxPolynomial(terms)


def detect_kind(text: str) -> str:
    """Guess the file kind from its first term line."""
    for _, _, body in _lines(text):
        if "max" in body:
            return "tropical"
        left = body.split(":", 1)[0]
        if "(" in left:
            return "puiseux"
        if "@" in left:
            return "viro"
        return "complex" if len(left.split()) == 2 else "tropical"
    raise ParseError("no terms", 1, 1)


def read_polynomial(path, kind: str | None = None):
    text = Path(path).read_text()
    kind = kind or detect_kind(text)
    parser = {"tropical": parse_tropical, "complex": parse_complex, "viro": parse_viro,
              "puiseux": parse_puiseux}[kind]
    return parser(text, str(path))


def format_complex_file(f: ComplexPolynomial) -> str:
    return "".join(f"{c.real!r} {c.imag!r} : {' '.join(map(str, a))}\n" for a, c in sorted(f.terms.items()))


def format_tropical_file(F: TropicalPolynomial) -> str:
    return "".join(f"{c} : {' '.join(map(str, a))}\n" for a, c in sorted(F.terms.items()))


def format_viro_file(fam: ViroFamily) -> str:
    return "".join(
        f"{c.real!r} {c.imag!r} @{fam.exponents[a]} : {' '.join(map(str, a))}\n" for a, c in sorted(fam.base.items())
    )


def format_series(a: PuiseuxSeries) -> str:
    if a.is_zero:
        return "(0.0,0.0)"
    return " + ".join(f"({c.real!r},{c.imag!r})t^{{{e}}}" for e, c in a.terms)


def format_puiseux_file(g: PuiseuxPolynomial) -> str:
    return "".join(f"{format_series(s)} : {' '.join(map(str, a))}\n" for a, s in sorted(g.terms.items()))


def write_cloud_csv(cloud: PointCloud, path=None) -> str:
    """Meta header ``space,n,t,seed`` and its values, a column header, then one point per row."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = cloud.n
    w.writerow(["space", "n", "t", "seed"])
    w.writerow([cloud.space, n, cloud.meta.get("t", ""), cloud.meta.get("seed", "")])
    cols = []
    if cloud.space in ("log", "phase"):
        cols += [f"log{i + 1}" for i in range(n)]
    if cloud.space in ("arg", "phase"):
        cols += [f"arg{i + 1}" for i in range(n)]
    w.writerow(cols)
    for row in cloud.points:
        w.writerow([repr(float(v)) for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_cloud_csv(path) -> PointCloud:
    return parse_cloud_csv(Path(path).read_text())


def parse_cloud_csv(text: str) -> PointCloud:
    rows = list(csv.reader(_io.StringIO(text)))
    if len(rows) < 3 or rows[0] != ["space", "n", "t", "seed"]:
        raise ParseError("missing cloud header", 1, 1)
    space, n, t, seed = rows[1]
    pts = np.array([[float(v) for v in r] for r in rows[3:]]) if len(rows) > 3 else np.empty((0, len(rows[2])))
    meta = {"t": float(t) if t not in ("", "inf") else t, "seed": int(seed) if seed.lstrip("-").isdigit() else seed}
    return PointCloud(space, pts, meta)


def _q(x) -> str | int | float:
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    return x


def complex_to_dict(Gamma: TropicalHypersurface) -> dict:
    cells = []
    for i, c in enumerate(Gamma.cells):
        cells.append({
            "id": i,
            "dim": c.dim,
            "points": [[_q(v) for v in p] for p in c.points],
            "rays": [list(r) for r in c.rays],
            "lineality": [list(r) for r in c.lineality],
            "affine_basis": [list(b) for b in c.affine_basis],
            "active_terms": sorted(list(a) for a in c.active_terms),
            "weight": c.weight,
            "dual_vertices": sorted(list(a) for a in c.dual),
            "dual_dim": c.dual_dim,
        })
    return {
        "ambient_dim": Gamma.ambient_dim,
        "counts": Gamma.counts(),
        "cells": cells,
        "dual_subdivision": [
            {"vertices": sorted(list(v) for v in cell.vertices),
             "points": sorted(list(v) for v in cell.points),
             "functional": {"a": [_q(v) for v in a], "b": _q(b)}}
            for cell, (a, b) in zip(Gamma.dual.cells, Gamma.dual.functionals)
        ],
        "snap_error": Gamma.snap_error,
    }


def spine_to_dict(s: SpineResult) -> dict:
    return {
        "coefficients": [
            {"alpha": list(a), "estimate": c, "stderr": e, "probe": list(map(float, s.probes.get(a, ())))}
            for a, (c, e) in sorted(s.coefficients.items())
        ],
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, Fraction):
        return _q(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")
