"""Phase tropical structure: fibers, W-lifts, foliation projection, pants graphs, moment maps."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._exact import frac, primitive, sub
from .amoeba import TWO_PI, PointCloud
from .polytope import Polytope, newton_polytope
from .puiseux import PuiseuxPolynomial, PuiseuxSeries, W, sample_puiseux_solutions, val
from .tropical import TropicalHypersurface, corner_locus, is_smooth, standard_hyperplane, trop_eval


@dataclass(frozen=True)
class FiberDescription:
    """Fiber of the phase tropical hypersurface over a point in the l-cell of Gamma.

    It is a real l-torus times the coamoeba of a hyperplane in ``(C*)^(n-l)``,
    whose dimension is ``n - 1 - l``.
    """

    cell_dim: int
    torus_rank: int
    coamoeba_dim: int
    ambient: int

    @property
    def description(self) -> str:
        if self.coamoeba_dim == 0:
            return "circle" if self.torus_rank == 1 else f"real {self.torus_rank}-torus"
        torus = f"(S^1)^{self.torus_rank} x " if self.torus_rank else ""
        if self.ambient == 2:
            return torus + "coamoeba of a line in (C*)^2: two triangles with vertices pairwise identified"
        return torus + f"coamoeba of a hyperplane in (C*)^{self.ambient}"


def fiber_over(Gamma: TropicalHypersurface, x: Sequence, tol: float = 1e-9) -> FiberDescription:
    """Fiber type over ``x`` for a Gamma that is locally a tropical hyperplane.

    Every smooth Gamma qualifies: near each of its points it is an integral
    affine image of the standard hyperplane.
    """
    if not is_smooth(Gamma):
        raise ValueError("fiber description requires a smooth Gamma (locally a tropical hyperplane)")
    cell = Gamma.locate(x, tol)
    if cell is None:
        raise ValueError("point is not on Gamma")
    n, l = Gamma.ambient_dim, cell.dim
    return FiberDescription(cell_dim=l, torus_rank=l, coamoeba_dim=n - 1 - l, ambient=n - l)


def _random_point_on_cell(cell, rng, ray_scale: int = 3, den: int = 8) -> tuple:
    """Exact rational point in the relative interior of a cell."""
    k = len(cell.points)
    w = [Fraction(int(rng.integers(1, den + 1)), 1) for _ in range(k)]
    tot = sum(w)
    pt = [sum(wi * frac(p[i]) for wi, p in zip(w, cell.points)) / tot for i in range(len(cell.points[0]))]
    for r in cell.rays:
        s = Fraction(int(rng.integers(1, ray_scale * den + 1)), den)
        pt = [a + s * b for a, b in zip(pt, r)]
    for ln in cell.lineality:
        s = Fraction(int(rng.integers(-ray_scale * den, ray_scale * den + 1)), den)
        pt = [a + s * b for a, b in zip(pt, ln)]
    return tuple(pt)


def _random_unit(rng) -> complex:
    return cmath.rect(math.exp(rng.normal(0.0, 0.7)), rng.uniform(0, TWO_PI))


def hyperplane_lift(x: Sequence, rng) -> tuple[PuiseuxSeries, ...]:
    """A point of ``V(1 + z_1 + ... + z_n)`` over the Puiseux field with valuation ``x``.

    ``x`` must lie on the standard tropical hyperplane. All but one coordinate
    are ``c_j t^{-x_j}`` with random ``c_j``; the solved coordinate is an active
    variable of ``x``, set to ``-1 - sum_{i != j} z_i``.
    """
    n = len(x)
    x = [frac(c) for c in x]
    F = standard_hyperplane(n)
    _, arg = trop_eval(F, x)
    if len(arg) < 2:
        raise ValueError("point is not on the standard hyperplane")
    active_vars = sorted(a.index(1) for a in arg if any(a))
    j = active_vars[int(rng.integers(len(active_vars)))]
    z = [PuiseuxSeries.monomial(_random_unit(rng), -x[i]) if i != j else None for i in range(n)]
    zj = PuiseuxSeries.constant(-1)
    for i in range(n):
        if i != j:
            zj = zj - z[i]
    z[j] = zj
    return tuple(z)


def lift_phase_cloud(source, k: int, seed=0, box: float = 3.0) -> PointCloud:
    """W-images of points of a hypersurface over the Puiseux field, in the phase space.

    ``source`` is either a dimension ``n`` (the standard hyperplane, lifted via
    its parametrization at random rational points of its cells) or a
    PuiseuxPolynomial (sampled by Newton-Puiseux). Log coordinates are the exact
    valuations converted to float.
    """
    rng = np.random.default_rng(seed)
    rows = []
    if isinstance(source, PuiseuxPolynomial):
        res = sample_puiseux_solutions(source, k, seed)
        pts = res.points
        meta_fail = len(res.failures)
    else:
        n = int(source)
        Gamma = corner_locus(standard_hyperplane(n))
        cells = list(Gamma.cells)
        pts = []
        while len(pts) < k:
            c = cells[int(rng.integers(len(cells)))]
            x = _random_point_on_cell(c, rng, ray_scale=int(box))
            pts.append(hyperplane_lift(x, rng))
        meta_fail = 0
    for p in pts:
        wv = W(p)
        rows.append([float(val(a)) for a in p] + [cmath.phase(c) % TWO_PI for c in wv])
    if not rows:
        raise ValueError("empty cloud")
    return PointCloud("phase", np.array(rows), {"t": "inf", "seed": seed, "k": k, "failures": meta_fail})


def foliation_project(x: Sequence, tol: float = 0) -> tuple:
    """Projection of a complement point of the standard hyperplane onto it.

    In the component ``C_i`` where term ``i`` strictly dominates, move along the
    line ``x + R v_i`` (``v_0 = (1,...,1)``, ``v_i = e_i``) to the first point
    where a second term ties. Exact for rational input.
    """
    n = len(x)
    exact = all(isinstance(c, (int, Fraction)) for c in x)
    xs = [frac(c) for c in x] if exact else [float(c) for c in x]
    F = standard_hyperplane(n)
    _, arg = trop_eval(F, xs) if exact else trop_eval(F, xs, tol or 1e-12)
    if len(arg) >= 2:
        return tuple(xs)
    (alpha,) = arg
    # term values along the line: l_b(x + s v) = <b, x> + s <b, v>
    if any(alpha):
        i = alpha.index(1)
        v = [int(m == i) for m in range(n)]
    else:
        v = [1] * n
    terms = [tuple(0 for _ in range(n))] + [tuple(int(m == i) for m in range(n)) for i in range(n)]

    best = None
    la0 = sum(a * c for a, c in zip(alpha, xs))
    lav = sum(a * c for a, c in zip(alpha, v))
    for b in terms:
        if b == alpha:
            continue
        lb0 = sum(c * d for c, d in zip(b, xs))
        lbv = sum(c * d for c, d in zip(b, v))
        if lbv == lav:
            continue
        s = (la0 - lb0) / (lbv - lav)
        # the tie must be the maximum on the line
        pt = [xx + s * vv for xx, vv in zip(xs, v)]
        top = max(sum(c * d for c, d in zip(bb, pt)) for bb in terms)
        here = sum(c * d for c, d in zip(alpha, pt))
        if (here == top) if exact else abs(here - top) <= 1e-9 * (1 + abs(top)):
            if best is None or abs(s) < abs(best):
                best = s
    if best is None:
        raise ValueError("the line through x misses the hyperplane")
    return tuple(xx + best * vv for xx, vv in zip(xs, v))


@dataclass(frozen=True)
class Gluing:
    node_i: int
    node_j: int
    direction: tuple
    dual_face: tuple
    dual_vector: tuple
    reverses_orientation: bool = True


@dataclass(frozen=True)
class Leg:
    node: int
    direction: tuple
    dual_face: tuple


@dataclass
class PantsGraph:
    nodes: list
    internal_edges: list
    boundary_legs: list
    ambient_dim: int

    def degree(self, i: int) -> int:
        return (sum(1 for e in self.internal_edges if i in (e.node_i, e.node_j))
                + sum(1 for g in self.boundary_legs if g.node == i))

    def as_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "nodes": [[str(c) for c in p] for p in self.nodes],
            "internal_edges": [
                {"nodes": [e.node_i, e.node_j], "direction": list(e.direction),
                 "dual_face": [list(p) for p in e.dual_face], "dual_vector": list(e.dual_vector),
                 "reverses_orientation": e.reverses_orientation}
                for e in self.internal_edges
            ],
            "boundary_legs": [
                {"node": g.node, "direction": list(g.direction), "dual_face": [list(p) for p in g.dual_face]}
                for g in self.boundary_legs
            ],
        }


def _dual_vector(face: frozenset) -> tuple:
    pts = sorted(face)
    if len(pts) == 2:
        return primitive(sub(pts[1], pts[0]))
    return ()


def pants_graph(Gamma: TropicalHypersurface) -> PantsGraph:
    """Nodes are the vertices of Gamma, internal edges its bounded 1-cells, legs its unbounded 1-cells."""
    if not is_smooth(Gamma):
        raise ValueError("pants decomposition requires smooth Γ")
    nodes = [c.points[0] for c in Gamma.vertices]
    index = {p: i for i, p in enumerate(nodes)}
    edges, legs = [], []
    for c in Gamma.cells_of_dim(1):
        dual = tuple(sorted(c.dual))
        if c.is_bounded:
            p, q = c.points
            edges.append(Gluing(index[p], index[q], primitive(sub(q, p)), dual, _dual_vector(c.dual)))
        else:
            legs.append(Leg(index[c.points[0]], c.rays[0], dual))
    return PantsGraph(nodes, edges, legs, Gamma.ambient_dim)


@dataclass(frozen=True)
class EulerData:
    chi_open: int
    chi_compact: int | str
    genus: int | str
    conjectural: bool

    def as_dict(self) -> dict:
        return {"chi_open": self.chi_open, "chi_compact": self.chi_compact, "genus": self.genus,
                "status": "conjectural" if self.conjectural else "exact"}


def euler_characteristics(g: PantsGraph, n: int | None = None) -> EulerData:
    """chi of the open hypersurface from its pants; compact data for curves only."""
    n = g.ambient_dim if n is None else n
    chi_open = (-1) ** (n - 1) * len(g.nodes)
    if n == 2:
        chi_c = chi_open + len(g.boundary_legs)
        return EulerData(chi_open, chi_c, (2 - chi_c) // 2, False)
    return EulerData(chi_open, "n/a", "n/a", n >= 3)


@dataclass(frozen=True)
class MomentData:
    polytope: Polytope
    weights: tuple

    def __post_init__(self):
        if not self.weights:
            raise ValueError("moment data needs at least one weight")

    @classmethod
    def from_polytope(cls, delta: Polytope) -> "MomentData":
        return cls(delta, tuple(delta.lattice_points()))

    @classmethod
    def from_support(cls, support) -> "MomentData":
        return cls.from_polytope(newton_polytope(support))


def _softmax_weights(md: MomentData, logs: np.ndarray) -> np.ndarray:
    A = np.array(md.weights, dtype=float)
    e = 2.0 * logs @ A.T
    e -= e.max(axis=-1, keepdims=True)
    w = np.exp(e)
    return w / w.sum(axis=-1, keepdims=True)


def moment_weights(md: MomentData, z) -> np.ndarray:
    """Barycentric weights ``|z^a|^2 / sum_b |z^b|^2`` over the lattice points."""
    z = np.asarray(z, dtype=complex)
    return _softmax_weights(md, np.log(np.abs(z)))


def moment_map(md: MomentData, z) -> np.ndarray:
    """``sum_a a |z^a|^2 / sum_a |z^a|^2`` (standard toric moment map)."""
    return moment_weights(md, z) @ np.array(md.weights, dtype=float)


def psi(md: MomentData, x) -> np.ndarray:
    """``Psi(x) = moment_map(e^x)``, computed in log form."""
    x = np.asarray(x, dtype=float)
    return _softmax_weights(md, x) @ np.array(md.weights, dtype=float)


@dataclass
class Landing:
    cell: object
    start: tuple
    direction: tuple
    limit: tuple
    face: tuple


@dataclass
class CompactifiedGamma:
    points: np.ndarray
    landings: list = field(default_factory=list)

    @property
    def boundary(self) -> np.ndarray:
        return np.array([l.limit for l in self.landings])


def _landing_face(delta: Polytope, direction) -> tuple:
    """Vertices of the face of Delta on which ``<., u>`` is maximal; the ray lands in its relative interior."""
    score = {v: sum(Fraction(a) * b for a, b in zip(v, direction)) for v in delta.vertices}
    top = max(score.values())
    return tuple(sorted(v for v, s in score.items() if s == top))


def ray_limit(md: MomentData, start, direction, tol: float = 1e-6, max_doublings: int = 200) -> np.ndarray:
    """Limit of ``Psi(start + s u)`` as ``s -> infinity``, followed until steps fall below ``tol``."""
    p = np.asarray([float(c) for c in start])
    u = np.asarray([float(c) for c in direction])
    s = 1.0
    prev = psi(md, p + s * u)
    for _ in range(max_doublings):
        s *= 2
        cur = psi(md, p + s * u)
        if np.linalg.norm(cur - prev) < tol:
            return cur
        prev = cur
    return prev


def compactify_gamma(Gamma: TropicalHypersurface, md: MomentData | None = None, box: float = 3.0,
                     step: float = 0.01, tol: float = 1e-6) -> CompactifiedGamma:
    """``Psi(Gamma)`` on a dense sample, plus the landing face of every ray of every unbounded 1-cell."""
    from .amoeba import sample_complex

    md = md or MomentData.from_polytope(Gamma.dual.polytope)
    sample = sample_complex(Gamma, box, step)
    image = psi(md, sample) if len(sample) else np.empty((0, Gamma.ambient_dim))
    landings = []
    for c in Gamma.cells_of_dim(1):
        if c.is_bounded:
            continue
        start = c.points[0]
        for u in c.rays or c.lineality:
            lim = ray_limit(md, start, u, tol)
            landings.append(Landing(c, start, u, tuple(float(v) for v in lim), _landing_face(md.polytope, u)))
    return CompactifiedGamma(image, landings)
