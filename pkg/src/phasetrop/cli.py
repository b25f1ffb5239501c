"""Command-line interface. Every command prints a JSON summary on stdout.

Exit status is 0 iff every check of the command passed, 1 if a check failed
and 2 for input or configuration errors.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io as pio
from .amoeba import (
    ComplexPolynomial,
    ViroFamily,
    hausdorff_distance,
    line_coamoeba_complement,
    localization_check,
    sample_hypersurface,
    spine,
)
from .pants import MomentData, compactify_gamma, euler_characteristics, lift_phase_cloud, pants_graph, psi
from .polytope import normalized_volume
from .puiseux import PuiseuxPolynomial, kapranov_tropicalize
from .svg import amoeba_svg, coamoeba_svg, curve_svg, line_coamoeba_boundaries
from .tropical import TropicalPolynomial, balancing_check, corner_locus, is_smooth, standard_hyperplane, trop_eval

STOCHASTIC = {"amoeba", "coamoeba", "spine", "converge", "localize", "lift"}


class ConfigError(ValueError):
    pass


@dataclass
class JobConfig:
    command: str
    inputs: list = field(default_factory=list)
    box: float = 3.0
    t: float | None = None
    ladder: list = field(default_factory=list)
    k: int | None = None
    N: int | None = None
    seed: int | None = None
    tolerances: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def validate(self):
        if self.command in STOCHASTIC and self.seed is None:
            raise ConfigError(f"--seed is required for {self.command}")
        if self.t is not None and not self.t > 1:
            raise ConfigError(f"t must exceed 1, got {self.t}")
        if any(not t > 1 for t in self.ladder):
            raise ConfigError("every t in the ladder must exceed 1")
        if not self.box > 0:
            raise ConfigError("box half-width must be positive")
        return self


def _ladder(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad ladder {text!r}") from None


def _point(text: str) -> tuple:
    return tuple(Fraction(x) for x in text.split(","))


def _cell(text: str) -> list:
    return [tuple(int(v) for v in p.split(",")) for p in text.split(";")]


def _load(path, kind=None):
    return pio.read_polynomial(path, kind)


def _as_tropical(obj) -> TropicalPolynomial:
    if isinstance(obj, TropicalPolynomial):
        return obj
    if isinstance(obj, PuiseuxPolynomial):
        return kapranov_tropicalize(obj)
    if isinstance(obj, ViroFamily):
        return obj.tropical_limit()
    raise ConfigError("expected a tropical polynomial")


def _write(path, text):
    if path:
        Path(path).write_text(text)


def cmd_corner_locus(args, cfg):
    F = _as_tropical(_load(args.poly))
    G = corner_locus(F)
    doc = pio.complex_to_dict(G)
    _write(args.json, pio.dumps(doc))
    if args.svg:
        _write(args.svg, curve_svg(G, cfg.box))
    balanced = balancing_check(G)
    return {"counts": G.counts(), "balanced": balanced, "smooth": is_smooth(G), "snap_error": G.snap_error}, balanced


def _cloud_source(path, t):
    obj = _load(path)
    if isinstance(obj, ViroFamily):
        return obj.evaluate_at(t)
    if not isinstance(obj, ComplexPolynomial):
        raise ConfigError("amoeba sampling needs a complex polynomial or a Viro family")
    return obj


def _sample(args, cfg):
    f = _cloud_source(args.poly, cfg.t)
    cloud = sample_hypersurface(f, cfg.t, cfg.box, cfg.k, cfg.seed)
    res = f.relative_residual(np.exp(cloud.points[:, : cloud.n] * math.log(cfg.t) + 1j * cloud.points[:, cloud.n:]))
    return f, cloud, float(res.max())


def cmd_amoeba(args, cfg):
    f, cloud, res = _sample(args, cfg)
    if args.csv:
        pio.write_cloud_csv(cloud.log_part() if args.log_only else cloud, args.csv)
    if args.svg and cloud.n == 2:
        _write(args.svg, amoeba_svg(cloud, None, cfg.box))
    ok = len(cloud) > 0 and res <= cfg.tolerances["residual"]
    return {"count": len(cloud), "rejected": cloud.meta["rejected"], "max_residual": res}, ok


def _line_phases(f: ComplexPolynomial):
    if set(f.terms) != {(0, 0), (1, 0), (0, 1)}:
        return None
    return tuple(float(np.angle(f.terms[a])) for a in [(1, 0), (0, 1), (0, 0)])


def cmd_coamoeba(args, cfg):
    f, cloud, res = _sample(args, cfg)
    if args.csv:
        pio.write_cloud_csv(cloud.arg_part(), args.csv)
    out = {"count": len(cloud), "rejected": cloud.meta["rejected"], "max_residual": res}
    ok = len(cloud) > 0 and res <= cfg.tolerances["residual"]
    alpha = _line_phases(f)
    lines = []
    if alpha is not None:
        inside = int(line_coamoeba_complement(cloud.arg_part().points, alpha).sum())
        out["in_open_complement"] = inside
        ok = ok and inside == 0
        lines = line_coamoeba_boundaries(alpha)
    if args.svg and cloud.n == 2:
        _write(args.svg, coamoeba_svg(cloud, lines))
    return out, ok


def cmd_spine(args, cfg):
    f = _load(args.poly)
    if not isinstance(f, ComplexPolynomial):
        raise ConfigError("spine needs a complex polynomial")
    s = spine(f, N=cfg.N, seed=cfg.seed, probe_scale=args.probe_scale)
    doc = pio.spine_to_dict(s)
    G = s.corner_locus()
    doc["counts"] = G.counts()
    _write(args.json, pio.dumps(doc))
    if args.svg and f.ambient_dim == 2:
        _write(args.svg, curve_svg(G, cfg.box))
    worst = max(e for _, e in s.coefficients.values())
    ok = worst <= cfg.tolerances["stderr"]
    if args.expect:
        ref = _as_tropical(_load(args.expect))
        dev = max(abs(s.coefficients[a][0] - float(ref.terms.get(a, math.nan))) for a in s.coefficients)
        doc["max_deviation"] = dev
        ok = ok and dev <= cfg.tolerances["coefficient"]
    doc["max_stderr"] = worst
    return doc, ok


def cmd_converge(args, cfg):
    fam = _load(args.family)
    if not isinstance(fam, ViroFamily):
        raise ConfigError("converge needs a Viro family file")
    G = corner_locus(fam.tropical_limit())
    rows = []
    for i, t in enumerate(cfg.ladder):
        cloud = sample_hypersurface(fam, t, cfg.box, cfg.k, cfg.seed)
        rows.append({"t": t, "hausdorff": hausdorff_distance(cloud.log_part(), G, cfg.box), "count": len(cloud)})
    ds = [r["hausdorff"] for r in rows]
    monotone = all(b <= a for a, b in zip(ds, ds[1:]))
    bound = cfg.tolerances["bound"]
    ok = monotone and ds[-1] <= bound
    return {"table": rows, "weakly_decreasing": monotone, "final_below_bound": ds[-1] <= bound, "bound": bound}, ok


def cmd_pants(args, cfg):
    G = corner_locus(_as_tropical(_load(args.poly)))
    g = pants_graph(G)
    e = euler_characteristics(g)
    doc = g.as_dict()
    doc["invariants"] = e.as_dict()
    _write(args.json, pio.dumps(doc))
    summary = {"nodes": len(g.nodes), "internal_edges": len(g.internal_edges),
               "boundary_legs": len(g.boundary_legs), **e.as_dict()}
    ok = all(g.degree(i) == G.ambient_dim + 1 for i in range(len(g.nodes)))
    return summary, ok


def cmd_localize(args, cfg):
    fam = _load(args.family)
    if not isinstance(fam, ViroFamily):
        raise ConfigError("localize needs a Viro family file")
    tau = fam.subdivision()
    cell = tau.cells[args.cell_id] if args.cell is None else _cell(args.cell)
    rep = localization_check(fam, cell, args.r, cfg.ladder, args.eps, cfg.k, cfg.seed)
    doc = rep.as_dict()
    _write(args.json, pio.dumps(doc))
    return doc, rep.passed and rep.monotone


def cmd_smooth_check(args, cfg):
    G = corner_locus(_as_tropical(_load(args.poly)))
    tau = G.dual
    cells = []
    for c in tau.cells:
        vol = normalized_volume(c) if c.dim == tau.ambient_dim else None
        cells.append({"vertices": sorted(list(v) for v in c.vertices), "volume": vol})
    smooth = is_smooth(G)
    return {"smooth": smooth, "cells": cells}, smooth


def cmd_moment(args, cfg):
    G = corner_locus(_as_tropical(_load(args.poly)))
    md = MomentData.from_polytope(G.dual.polytope)
    out = {}
    if args.point:
        x = [float(v) for v in _point(args.point)]
        out["psi"] = psi(md, x).tolist()
    comp = compactify_gamma(G, md, cfg.box)
    out["landings"] = [{"direction": list(l.direction), "limit": list(l.limit), "face": [list(v) for v in l.face]}
                       for l in comp.landings]
    legs = sum(1 for c in G.cells_of_dim(1) if not c.is_bounded)
    ok = all(l.face for l in comp.landings)
    if G.ambient_dim == 2:
        ok = ok and len(comp.landings) == legs
    return out, ok


def cmd_lift(args, cfg):
    if args.hyperplane:
        cloud = lift_phase_cloud(args.hyperplane, cfg.k, cfg.seed, cfg.box)
        F = standard_hyperplane(args.hyperplane)
    else:
        g = _load(args.poly, "puiseux")
        cloud = lift_phase_cloud(g, cfg.k, cfg.seed)
        F = kapranov_tropicalize(g)
    if args.csv:
        pio.write_cloud_csv(cloud, args.csv)
    if args.svg and cloud.n == 2:
        _write(args.svg, coamoeba_svg(cloud))
    n = cloud.n
    on = sum(len(trop_eval(F, list(p[:n]), 1e-9)[1]) >= 2 for p in cloud.points)
    return {"count": len(cloud), "on_tropical": int(on), "failures": cloud.meta.get("failures", 0)}, on == len(cloud)


COMMANDS = {
    "corner-locus": cmd_corner_locus, "amoeba": cmd_amoeba, "coamoeba": cmd_coamoeba, "spine": cmd_spine,
    "converge": cmd_converge, "pants": cmd_pants, "localize": cmd_localize, "smooth-check": cmd_smooth_check,
    "moment": cmd_moment, "lift": cmd_lift,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phasetrop", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=False):
        sp.add_argument("--box", type=float, default=3.0, help="half-width of the box [-b, b]^n")
        if seed:
            sp.add_argument("--seed", type=int, default=None, help="required: seed for all randomness")
        return sp

    s = common(sub.add_parser("corner-locus", help="cells of a tropical hypersurface"))
    s.add_argument("poly")
    s.add_argument("--json")
    s.add_argument("--svg")

    for name in ("amoeba", "coamoeba"):
        s = common(sub.add_parser(name, help=f"sample the {name} of a complex polynomial"), seed=True)
        s.add_argument("poly")
        s.add_argument("--t", type=float, default=math.e)
        s.add_argument("--k", type=int, default=1000)
        s.add_argument("--residual", type=float, default=1e-8)
        s.add_argument("--csv")
        s.add_argument("--svg")
        s.add_argument("--log-only", action="store_true")

    s = common(sub.add_parser("spine", help="Monte-Carlo spine of an amoeba"), seed=True)
    s.add_argument("poly")
    s.add_argument("--N", type=int, default=10**5)
    s.add_argument("--probe-scale", type=float, default=10.0)
    s.add_argument("--expect", help="tropical polynomial the spine should match")
    s.add_argument("--coefficient-tol", type=float, default=0.02)
    s.add_argument("--stderr-tol", type=float, default=0.01)
    s.add_argument("--json")
    s.add_argument("--svg")

    s = common(sub.add_parser("converge", help="Hausdorff distances along a t ladder"), seed=True)
    s.add_argument("family")
    s.add_argument("--ladder", default="10,100,1000,1e6")
    s.add_argument("--k", type=int, default=20000)
    s.add_argument("--bound", type=float, default=0.05)

    s = common(sub.add_parser("pants", help="pair-of-pants graph and Euler characteristics"))
    s.add_argument("poly")
    s.add_argument("--json")

    s = common(sub.add_parser("localize", help="tropical localization check"), seed=True)
    s.add_argument("family")
    s.add_argument("--cell", help="cell vertices as 'a,b;c,d;...'")
    s.add_argument("--cell-id", type=int, default=0)
    s.add_argument("--r", type=float, default=0.5)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--ladder", default="10,100,1000,1e6")
    s.add_argument("--k", type=int, default=2000, help="samples per t")
    s.add_argument("--json")

    s = common(sub.add_parser("smooth-check", help="unimodularity of the dual subdivision"))
    s.add_argument("poly")

    s = common(sub.add_parser("moment", help="moment map image and ray landings"))
    s.add_argument("poly")
    s.add_argument("--point", help="evaluate Psi at 'x1,x2,...'")

    s = common(sub.add_parser("lift", help="W-lift of a hypersurface over the Puiseux field"), seed=True)
    group = s.add_mutually_exclusive_group(required=True)
    group.add_argument("--hyperplane", type=int, help="lift the standard hyperplane in dimension n")
    group.add_argument("--poly", help="Puiseux polynomial file")
    s.add_argument("--k", type=int, default=500)
    s.add_argument("--csv")
    s.add_argument("--svg")
    return p


def _config(args) -> JobConfig:
    cfg = JobConfig(command=args.command, box=args.box, seed=getattr(args, "seed", None))
    cfg.inputs = [getattr(args, a) for a in ("poly", "family") if getattr(args, a, None)]
    if hasattr(args, "t"):
        cfg.t = args.t
    if hasattr(args, "ladder"):
        cfg.ladder = _ladder(args.ladder)
    cfg.k = getattr(args, "k", None)
    cfg.N = getattr(args, "N", None)
    cfg.tolerances = {
        "residual": getattr(args, "residual", 1e-8),
        "bound": getattr(args, "bound", None),
        "coefficient": getattr(args, "coefficient_tol", None),
        "stderr": getattr(args, "stderr_tol", None),
    }
    cfg.outputs = {a: getattr(args, a) for a in ("json", "svg", "csv") if getattr(args, a, None)}
    if cfg.k is not None and cfg.k < 1 and args.command in ("amoeba", "coamoeba"):
        raise ValueError("empty cloud")
    return cfg.validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    summary = {"command": args.command}
    try:
        cfg = _config(args)
        result, ok = COMMANDS[args.command](args, cfg)
        summary.update(result=result, ok=bool(ok))
        code = 0 if ok else 1
    except (ConfigError, pio.ParseError, ValueError, OSError) as exc:
        print(f"phasetrop {args.command}: {exc}", file=sys.stderr)
        summary.update(ok=False, error=str(exc))
        code = 2
    sys.stdout.write(pio.dumps(summary))
    return code


if __name__ == "__main__":
    sys.exit(main())
