"""Exact lattice polytopes and regular subdivisions induced by liftings.

Everything here is exact: lattice points are integer tuples, liftings and
affine functionals are ``Fraction``. Convex hulls are found by enumerating
supporting hyperplanes through affinely independent subsets, which is
quadratic-to-cubic in the number of points but fine for the small supports
(tens of points, dimension <= 4) this package targets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, product
from math import factorial, gcd
from typing import Iterable, Mapping, Sequence

from ._exact import det, dot, frac, nullspace, primitive, project_onto_span, rref, sub

Point = tuple  # tuple[int, ...]
Lifting = Mapping  # Mapping[Point, Fraction]


def _check_points(points: Iterable[Sequence[int]]) -> frozenset:
    pts = frozenset(tuple(int(c) for c in p) for p in points)
    if not pts:
        raise ValueError("empty support")
    dims = {len(p) for p in pts}
    if len(dims) != 1:
        raise ValueError(f"lattice points of mixed dimension: {sorted(dims)}")
    return pts


def _hull_frame(points: frozenset) -> tuple[Point, list[int], list[list[Fraction]]]:
    """Base point, pivot coordinates and RREF direction basis of the affine hull.

    Projection onto the pivot coordinates is injective on the affine hull.
    """
    pts = sorted(points)
    base = pts[0]
    diffs = [sub(p, base) for p in pts[1:]]
    if not diffs:
        return base, [], []
    red, pivots = rref(diffs)
    return base, pivots, red


def affine_dimension(points: Iterable[Sequence[int]]) -> int:
    return len(_hull_frame(frozenset(map(tuple, points)))[1])


@lru_cache(maxsize=4096)
def _facets(points: frozenset) -> tuple[tuple[tuple, Fraction, frozenset], ...]:
    """Facets of conv(points) relative to its affine hull.

    Each facet is ``(normal, offset, facet_points)`` with ``<normal, p> <= offset``
    on all points and equality exactly on ``facet_points``. ``normal`` lives in
    the ambient space, supported on the pivot coordinates of the hull.
    """
    base, pivots, _ = _hull_frame(points)
    d = len(pivots)
    if d == 0:
        return ()
    n = len(base)
    pts = sorted(points)
    proj = {p: tuple(p[c] for c in pivots) for p in pts}
    found: dict[frozenset, tuple] = {}
    covered: list[frozenset] = []
    for combo in combinations(pts, d):
        if any(set(combo) <= f for f in covered):
            continue
        q0 = proj[combo[0]]
        diffs = [sub(proj[q], q0) for q in combo[1:]]
        ns = nullspace(diffs, d)
        if len(ns) != 1:
            continue
        h = ns[0]
        vals = [dot(h, sub(proj[p], q0)) for p in pts]
        if all(v <= 0 for v in vals):
            pass
        elif all(v >= 0 for v in vals):
            h = [-x for x in h]
        else:
            continue
        on = frozenset(p for p, v in zip(pts, vals) if v == 0)
        if on in found:
            continue
        normal = [Fraction(0)] * n
        for c, hc in zip(pivots, h):
            normal[c] = hc
        normal = tuple(normal)
        found[on] = (normal, dot(normal, combo[0]), on)
        covered.append(on)
    return tuple(found[k] for k in sorted(found, key=sorted))


@lru_cache(maxsize=4096)
def _vertices(points: frozenset) -> frozenset:
    base, pivots, _ = _hull_frame(points)
    d = len(pivots)
    if d == 0:
        return points
    facets = _facets(points)
    verts = set()
    for p in points:
        normals = [[f[0][c] for c in pivots] for f in facets if p in f[2]]
        if normals and len(rref(normals)[1]) == d:
            verts.add(p)
    return frozenset(verts)


@lru_cache(maxsize=4096)
def _faces(points: frozenset) -> dict:
    """All nonempty faces of conv(points) as point sets, mapped to their dimension."""
    d = len(_hull_frame(points)[1])
    out = {points: d}
    if d == 0:
        return out
    for _, _, fpts in _facets(points):
        out.update(_faces(fpts))
    return out


def _triangulate(points: frozenset) -> list[tuple]:
    """Pulling triangulation: cone from the smallest vertex over the far facets."""
    d = len(_hull_frame(points)[1])
    verts = _vertices(points)
    if d == 0:
        return [tuple(verts)]
    apex = min(verts)
    simplices = []
    for _, _, fpts in _facets(points):
        if apex in fpts:
            continue
        for s in _triangulate(fpts):
            simplices.append((apex,) + s)
    return simplices


@dataclass(frozen=True)
class Polytope:
    """Convex hull of lattice points.

    ``vertices`` are the extreme points only. ``points`` keeps every lattice
    point of the generating set that lies in the polytope; for cells of a
    regular subdivision these include the marked (non-vertex) points lifted
    onto the lower hull.
    """

    vertices: frozenset
    dim: int
    ambient_dim: int
    points: frozenset = field(default=None, compare=False)

    def __post_init__(self):
        if self.points is None:
            object.__setattr__(self, "points", self.vertices)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]]) -> "Polytope":
        pts = _check_points(points)
        return cls(
            vertices=_vertices(pts),
            dim=len(_hull_frame(pts)[1]),
            ambient_dim=len(next(iter(pts))),
            points=pts,
        )

    @property
    def sorted_vertices(self) -> list[Point]:
        return sorted(self.vertices)

    @cached_property
    def facets(self) -> tuple:
        return _facets(self.vertices)

    @cached_property
    def _equations(self) -> list[tuple[tuple, Fraction]]:
        # Linear equations cutting out the affine hull.
        base = min(self.vertices)
        diffs = [sub(v, base) for v in self.vertices if v != base]
        normals = nullspace(diffs, self.ambient_dim) if diffs else nullspace([], self.ambient_dim)
        return [(tuple(h), dot(h, base)) for h in normals]

    def contains(self, x: Sequence) -> bool:
        """Exact membership for rational (or integer) points."""
        xf = [frac(c) for c in x]
        if any(dot(h, xf) != c for h, c in self._equations):
            return False
        return all(dot(h, xf) <= c for h, c, _ in self.facets)

    def lattice_points(self) -> list[Point]:
        verts = self.sorted_vertices
        lo = [min(v[i] for v in verts) for i in range(self.ambient_dim)]
        hi = [max(v[i] for v in verts) for i in range(self.ambient_dim)]
        ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
        return [p for p in product(*ranges) if self.contains(p)]

    def faces(self) -> dict:
        """Faces of the polytope as vertex sets mapped to dimension."""
        return {_vertices(f): k for f, k in _faces(self.vertices).items()}

    def outward_normals(self) -> list[tuple[tuple, frozenset]]:
        """Outward facet normals (primitive, in the linear span of the polytope)."""
        base = min(self.vertices)
        span = [sub(v, base) for v in self.vertices if v != base]
        basis = rref(span)[0] if span else []
        out = []
        for h, _, fpts in self.facets:
            proj = project_onto_span(h, basis) if len(basis) < self.ambient_dim else list(h)
            out.append((primitive(proj), frozenset(fpts) & self.vertices))
        return out


def newton_polytope(support: Iterable[Sequence[int]]) -> Polytope:
    """Convex hull of a support set, with its exact vertex set."""
    return Polytope.from_points(support)


def normalized_volume(cell: Polytope) -> Fraction:
    """Exact Euclidean volume of a full-dimensional lattice polytope."""
    n = cell.ambient_dim
    if cell.dim != n:
        raise ValueError("degenerate cell")
    total = Fraction(0)
    for s in _triangulate(cell.vertices):
        m = [sub(v, s[0]) for v in s[1:]]
        total += abs(det(m))
    return total / factorial(n)


@dataclass(frozen=True)
class RegularSubdivision:
    """Lower-hull subdivision of ``conv(domain)`` induced by ``lifting``.

    ``functionals[i] = (a, b)`` is the affine function ``x -> <x, a> + b`` whose
    graph carries the lower facet above ``cells[i]``. When the domain is not
    full dimensional, ``a`` is the representative lying in the span of the
    domain, so that it is also the dual tropical vertex.
    """

    domain: frozenset
    lifting: Mapping
    cells: tuple
    functionals: tuple
    polytope: Polytope

    @property
    def ambient_dim(self) -> int:
        return self.polytope.ambient_dim

    @property
    def dim(self) -> int:
        return self.polytope.dim

    def functional(self, cell: Polytope) -> tuple[tuple, Fraction]:
        return self.functionals[self.cells.index(cell)]

    def lower_points(self) -> frozenset:
        """Domain points lying on the lower hull (vertices and marked points)."""
        out = set()
        for c in self.cells:
            out |= c.points
        return frozenset(out)

    def faces(self) -> dict:
        """Every face of every cell, as the set of lower-hull points it carries.

        Keys are point sets (marked points included), values are dimensions.
        """
        out: dict = {}
        for c in self.cells:
            for f, k in _faces(c.points).items():
                out[f] = k
        return out

    def cells_containing(self, face_points: frozenset) -> list[int]:
        return [i for i, c in enumerate(self.cells) if face_points <= c.points]


def regular_subdivision(domain: Iterable[Sequence[int]], nu: Mapping) -> RegularSubdivision:
    """Project the lower faces of the lifted point configuration back to the domain."""
    pts = _check_points(domain)
    lift = {}
    for p in pts:
        if p not in nu:
            raise ValueError(f"lifting undefined at {p}")
        lift[p] = frac(nu[p])
    n = len(next(iter(pts)))
    base, pivots, hull_basis = _hull_frame(pts)
    d = len(pivots)
    spts = sorted(pts)
    delta = Polytope.from_points(pts)

    if d == 0:
        cell = Polytope(frozenset(pts), 0, n, frozenset(pts))
        a = tuple(Fraction(0) for _ in range(n))
        return RegularSubdivision(pts, lift, (cell,), ((a, lift[spts[0]]),), delta)

    den = 1
    for v in lift.values():
        den = den * v.denominator // gcd(den, v.denominator)
    lifted = {p: tuple(p[c] for c in pivots) + (int(lift[p] * den),) for p in spts}

    cells: dict[frozenset, tuple] = {}
    covered: list[frozenset] = []
    for combo in combinations(spts, d + 1):
        if any(set(combo) <= c for c in covered):
            continue
        q0 = lifted[combo[0]]
        diffs = [sub(lifted[q], q0) for q in combo[1:]]
        ns = nullspace(diffs, d + 1)
        if len(ns) != 1 or ns[0][-1] == 0:
            continue
        normal = ns[0]
        if normal[-1] > 0:
            normal = [-x for x in normal]
        vals = [dot(normal, sub(lifted[p], q0)) for p in spts]
        if any(v > 0 for v in vals):
            continue
        on = frozenset(p for p, v in zip(spts, vals) if v == 0)
        if on in cells:
            continue
        ny = normal[-1]
        a_proj = [-x / (ny * den) for x in normal[:-1]]
        b = dot(normal, q0) / (ny * den)
        a = [Fraction(0)] * n
        for c, ac in zip(pivots, a_proj):
            a[c] = ac
        cells[on] = (a, b)
        covered.append(on)

    if d < n:
        # Canonical slope: the representative inside the span of the domain.
        for key, (a, b) in list(cells.items()):
            a_span = project_onto_span(a, hull_basis)
            w = [x - y for x, y in zip(a, a_span)]
            cells[key] = (a_span, b + dot(base, w))

    order = sorted(cells, key=lambda s: sorted(s))
    cell_polys = tuple(Polytope(_vertices(s), d, n, s) for s in order)
    funcs = tuple((tuple(cells[s][0]), cells[s][1]) for s in order)
    return RegularSubdivision(pts, lift, cell_polys, funcs, delta)


def is_smooth_subdivision(tau: RegularSubdivision) -> bool:
    """True iff every cell is a lattice simplex of Euclidean volume 1/n!."""
    n = tau.ambient_dim
    unit = Fraction(1, factorial(n))
    for cell in tau.cells:
        if cell.dim != n or len(cell.vertices) != n + 1:
            return False
        if normalized_volume(cell) != unit:
            return False
    return True
