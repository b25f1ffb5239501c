"""Max-plus tropical polynomials and their corner loci.

Convention: a tropical polynomial ``F(x) = max_a { c_a + <a, x> }`` is dual to
the regular subdivision of its support for the lifting ``nu(a) = -c_a``. A
full cell with lower functional ``(a_v, b_v)`` is dual to the tropical vertex
``a_v``; a face ``G`` of the subdivision of dimension ``j`` is dual to the cell
``{x : argmax F(x) contains G}`` of dimension ``n - j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from numbers import Rational
from typing import Mapping, Sequence

from ._exact import dot, lattice_length, nullspace, primitive, sub
from .polytope import (
    Polytope,
    RegularSubdivision,
    _vertices,
    is_smooth_subdivision,
    regular_subdivision,
)

EVAL_TOL = 1e-9
DEFAULT_SNAP_DENOMINATOR = 10**6


def _is_exact(c) -> bool:
    return isinstance(c, (int, Rational)) and not isinstance(c, bool)


@dataclass(frozen=True, eq=False)
class TropicalPolynomial:
    """``terms`` maps exponent tuples to coefficients (exact or float)."""

    terms: Mapping

    def __post_init__(self):
        if not self.terms:
            raise ValueError("tropical polynomial needs at least one term")
        clean = {}
        for alpha, c in self.terms.items():
            key = tuple(int(a) for a in alpha)
            clean[key] = Fraction(c) if _is_exact(c) else float(c)
        dims = {len(k) for k in clean}
        if len(dims) != 1:
            raise ValueError("exponents must share one ambient dimension")
        object.__setattr__(self, "terms", clean)

    def __eq__(self, other):
        return isinstance(other, TropicalPolynomial) and self.terms == other.terms

    def __repr__(self):
        return f"TropicalPolynomial({format_tropical(self)})"

    @property
    def ambient_dim(self) -> int:
        return len(next(iter(self.terms)))

    @property
    def support(self) -> frozenset:
        return frozenset(self.terms)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.terms.values())

    def __call__(self, x: Sequence) -> float | Fraction:
        return trop_eval(self, x)[0]

    def snapped(self, max_denominator: int = DEFAULT_SNAP_DENOMINATOR) -> tuple["TropicalPolynomial", float]:
        """Rational approximation of every float coefficient, and the largest shift made."""
        out, worst = {}, 0.0
        for a, c in self.terms.items():
            if isinstance(c, Fraction):
                out[a] = c
            else:
                q = Fraction(c).limit_denominator(max_denominator)
                worst = max(worst, abs(float(q) - c))
                out[a] = q
        return TropicalPolynomial(out), worst


def format_tropical(F: TropicalPolynomial) -> str:
    names = _var_names(F.ambient_dim)
    parts = []
    for a in sorted(F.terms):
        mono = "+".join(
            (n if e == 1 else f"{e}{n}") for e, n in zip(a, names) if e != 0
        )
        c = F.terms[a]
        if mono and c == 0:
            parts.append(mono)
        elif mono:
            parts.append(f"{c}+{mono}")
        else:
            parts.append(str(c))
    return "max{" + ", ".join(parts) + "}"


def _var_names(n: int) -> list[str]:
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i + 1}" for i in range(n)]


def trop_eval(F: TropicalPolynomial, x: Sequence, tol: float = EVAL_TOL):
    """Value of ``F`` at ``x`` and the set of exponents attaining it.

    Exact when the coefficients and ``x`` are rational; otherwise ties are
    detected with an absolute tolerance ``tol``.
    """
    if len(x) != F.ambient_dim:
        raise ValueError(f"point has dimension {len(x)}, expected {F.ambient_dim}")
    exact = F.is_exact and all(_is_exact(c) for c in x)
    if exact:
        xs = [Fraction(c) for c in x]
        vals = {a: c + dot(a, xs) for a, c in F.terms.items()}
        top = max(vals.values())
        return top, frozenset(a for a, v in vals.items() if v == top)
    xs = [float(c) for c in x]
    vals = {a: float(c) + sum(ai * xi for ai, xi in zip(a, xs)) for a, c in F.terms.items()}
    top = max(vals.values())
    return top, frozenset(a for a, v in vals.items() if v >= top - tol)


def dual_subdivision(F: TropicalPolynomial, max_denominator: int = DEFAULT_SNAP_DENOMINATOR) -> RegularSubdivision:
    """Regular subdivision of the support lifted by ``nu(a) = -c_a``."""
    exact = F if F.is_exact else F.snapped(max_denominator)[0]
    return regular_subdivision(exact.support, {a: -c for a, c in exact.terms.items()})


@dataclass(frozen=True)
class TropicalCell:
    """A closed cell of a tropical hypersurface.

    The cell is ``conv(points) + cone(rays) + span(lineality)``. ``points`` are
    the tropical vertices on the cell (minimal-face representatives when the
    support is not full dimensional). ``affine_basis`` is a primitive integer
    basis of the cell's direction space.
    """

    dim: int
    points: tuple
    rays: tuple
    lineality: tuple
    affine_basis: tuple
    active_terms: frozenset
    weight: int
    dual: frozenset
    dual_dim: int

    @property
    def affine_point(self) -> tuple:
        return self.points[0]

    @property
    def is_bounded(self) -> bool:
        return not self.rays and not self.lineality

    def interior_point(self) -> tuple:
        k = len(self.points)
        n = len(self.points[0])
        return tuple(
            sum(p[i] for p in self.points) / k + sum(r[i] for r in self.rays) for i in range(n)
        )


@dataclass(frozen=True)
class TropicalHypersurface:
    cells: tuple
    ambient_dim: int
    source: TropicalPolynomial
    dual: RegularSubdivision
    snap_error: float = 0.0

    def cells_of_dim(self, k: int) -> list[TropicalCell]:
        return [c for c in self.cells if c.dim == k]

    @property
    def vertices(self) -> list[TropicalCell]:
        return self.cells_of_dim(0)

    def counts(self) -> dict:
        """Cell counts by dimension, with 1-cells split into bounded edges and rays."""
        out = {f"dim{k}": len(self.cells_of_dim(k)) for k in range(self.ambient_dim)}
        ones = self.cells_of_dim(1)
        out["bounded_edges"] = sum(1 for c in ones if c.is_bounded)
        out["unbounded_edges"] = sum(1 for c in ones if not c.is_bounded)
        return out

    def contains(self, x: Sequence, tol: float = EVAL_TOL) -> bool:
        return len(trop_eval(self.source, x, tol)[1]) >= 2

    def locate(self, x: Sequence, tol: float = EVAL_TOL) -> TropicalCell | None:
        """The cell whose relative interior contains ``x``, or None off the hypersurface."""
        _, arg = trop_eval(self.source, x, tol)
        if len(arg) < 2:
            return None
        lower = self.dual.lower_points()
        arg = arg & lower
        for c in self.cells:
            if c.active_terms == arg:
                return c
        return None

    def faces_of(self, cell: TropicalCell) -> list[TropicalCell]:
        return [c for c in self.cells if c is not cell and cell.active_terms < c.active_terms]


def _int_basis(rows: list, n: int) -> tuple:
    return tuple(primitive(v) for v in nullspace(rows, n))


def corner_locus(F: TropicalPolynomial, max_denominator: int = DEFAULT_SNAP_DENOMINATOR) -> TropicalHypersurface:
    """Corner locus of ``F`` as a polyhedral complex dual to its subdivision."""
    if len(F.terms) < 2:
        raise ValueError("no corner locus")
    exact, snap = F.snapped(max_denominator)
    tau = dual_subdivision(exact)
    n = exact.ambient_dim
    delta: Polytope = tau.polytope
    base = min(delta.vertices)
    span_rows = [sub(v, base) for v in delta.vertices if v != base]
    lineality = _int_basis(span_rows, n)
    facets = list(zip(delta.facets, delta.outward_normals()))

    cells = []
    for face, fdim in tau.faces().items():
        if fdim == 0:
            continue
        owners = tau.cells_containing(face)
        pts = tuple(sorted(tuple(tau.functionals[i][0]) for i in owners))
        rays = tuple(
            sorted(
                nrm
                for (h, off, _), (nrm, _) in facets
                if all(dot(h, p) == off for p in face)
            )
        )
        f0 = min(face)
        diffs = [sub(p, f0) for p in face if p != f0]
        basis = _int_basis(diffs, n)
        verts = sorted(_vertices(face))
        weight = lattice_length(verts[0], verts[-1]) if fdim == 1 else 1
        cells.append(
            TropicalCell(
                dim=n - fdim,
                points=pts,
                rays=rays,
                lineality=lineality,
                affine_basis=basis,
                active_terms=face,
                weight=weight,
                dual=frozenset(verts),
                dual_dim=fdim,
            )
        )
    cells.sort(key=lambda c: (c.dim, c.points, c.rays, sorted(c.active_terms)))
    return TropicalHypersurface(tuple(cells), n, exact, tau, snap)


def _det2(u, v):
    return u[0] * v[1] - u[1] * v[0]


def balancing_check(Gamma: TropicalHypersurface) -> bool:
    """Weighted primitive normals around every codimension-2 cell sum to zero.

    Normals are computed from the cells' own geometry and oriented by a
    common rotation sense in the plane orthogonal to the codimension-2 cell;
    adjacency is read from the active term sets.
    """
    n = Gamma.ambient_dim
    tops = Gamma.cells_of_dim(n - 1)
    for tau in Gamma.cells_of_dim(n - 2):
        plane = nullspace([list(b) for b in tau.affine_basis], n)
        if len(plane) != 2:
            return False
        e1, e2 = plane
        q = tau.interior_point()
        total = [Fraction(0)] * n
        adjacent = [s for s in tops if s.active_terms < tau.active_terms]
        if not adjacent:
            return False
        for s in adjacent:
            nrm = nullspace([list(b) for b in s.affine_basis], n)
            if len(nrm) != 1:
                return False
            normal = primitive(nrm[0])
            r = sub(s.interior_point(), q)
            cr = (dot(r, e1), dot(r, e2))
            cn = (dot(normal, e1), dot(normal, e2))
            orient = _det2(cr, cn)
            if orient == 0:
                return False
            sign = 1 if orient > 0 else -1
            for i in range(n):
                total[i] += sign * s.weight * normal[i]
        if any(t != 0 for t in total):
            return False
    return True


def is_smooth(Gamma: TropicalHypersurface) -> bool:
    return is_smooth_subdivision(dual_subdivision(Gamma.source))


def standard_hyperplane(n: int) -> TropicalPolynomial:
    """``max{0, x_1, ..., x_n}``."""
    terms = {tuple(0 for _ in range(n)): 0}
    for i in range(n):
        terms[tuple(int(j == i) for j in range(n))] = 0
    return TropicalPolynomial(terms)


def smooth_plane_curve(d: int) -> TropicalPolynomial:
    """Degree ``d`` plane curve dual to the hexagonal unimodular triangulation of d*simplex.

    The lifting ``nu(i, j) = i^2 + i j + j^2`` is strictly convex on the
    triangular lattice, so every cell is a unit triangle.
    """
    return TropicalPolynomial(
        {(i, j): -(i * i + i * j + j * j) for i in range(d + 1) for j in range(d + 1 - i)}
    )


def unit_simplex_volume(n: int) -> Fraction:
    return Fraction(1, factorial(n))
