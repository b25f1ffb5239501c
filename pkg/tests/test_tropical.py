import dataclasses
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasetrop import catalog
from phasetrop.tropical import (
    TropicalPolynomial,
    balancing_check,
    corner_locus,
    dual_subdivision,
    format_tropical,
    is_smooth,
    smooth_plane_curve,
    standard_hyperplane,
    trop_eval,
)

LINE = standard_hyperplane(2)


def test_eval_hyperbola_below_both_vertices():
    F = catalog.hyperbola_tropical(-1)
    assert trop_eval(F, (-2, -2)) == (-1, {(0, 0)})


def test_eval_triple_tie_at_vertex():
    assert trop_eval(LINE, (0, 0)) == (0, {(0, 0), (1, 0), (0, 1)})


def test_eval_single_winner():
    assert trop_eval(LINE, (3, 1)) == (3, {(1, 0)})


def test_eval_float_tolerance():
    value, arg = trop_eval(LINE, (1e-12, 0.0))
    assert arg == {(0, 0), (1, 0), (0, 1)} and abs(value) < 1e-11


def test_standard_line_cells():
    G = corner_locus(LINE)
    (v,) = G.vertices
    assert v.points == ((0, 0),)
    rays = sorted(c.rays[0] for c in G.cells_of_dim(1))
    assert rays == [(-1, 0), (0, -1), (1, 1)]
    assert all(c.weight == 1 for c in G.cells_of_dim(1))
    assert G.counts() == {"dim0": 1, "dim1": 3, "bounded_edges": 0, "unbounded_edges": 3}


def test_hyperbola_corner_locus():
    G = corner_locus(catalog.hyperbola_tropical(-1))
    assert sorted(c.points[0] for c in G.vertices) == [(-1, -1), (0, 0)]
    (edge,) = [c for c in G.cells_of_dim(1) if c.is_bounded]
    assert sorted(edge.points) == [(-1, -1), (0, 0)]
    assert edge.dual == {(1, 0), (0, 1)}
    assert len([c for c in G.cells_of_dim(1) if not c.is_bounded]) == 4


def test_one_variable_corner():
    G = corner_locus(TropicalPolynomial({(0,): 0, (1,): 0}))
    (v,) = G.vertices
    assert v.points == ((0,),) and v.weight == 1


def test_single_term_has_no_corner_locus():
    with pytest.raises(ValueError, match="no corner locus"):
        corner_locus(TropicalPolynomial({(1, 1): 3}))


def test_weight_is_lattice_length():
    G = corner_locus(TropicalPolynomial({(0, 0): 0, (2, 0): 0, (0, 1): 0}))
    w = {c.rays[0]: c.weight for c in G.cells_of_dim(1)}
    assert w[(0, -1)] == 2
    assert w[(1, 2)] == 1 and w[(-1, 0)] == 1


def test_dual_edge_orthogonality():
    for F in (catalog.hyperbola_tropical(-1), smooth_plane_curve(3)):
        G = corner_locus(F)
        for c in G.cells_of_dim(1):
            a, b = sorted(c.dual)
            d = (b[0] - a[0], b[1] - a[1])
            v = c.points[0]
            for u in c.rays + c.affine_basis:
                assert d[0] * u[0] + d[1] * u[1] == 0
            for p in c.points:
                assert (p[0] - v[0]) * d[0] + (p[1] - v[1]) * d[1] == 0


def test_balancing_detects_wrong_weight():
    G = corner_locus(LINE)
    assert balancing_check(G)
    cells = list(G.cells)
    i = next(k for k, c in enumerate(cells) if c.dim == 1)
    cells[i] = dataclasses.replace(cells[i], weight=2)
    assert not balancing_check(dataclasses.replace(G, cells=tuple(cells)))


def test_dual_subdivision_examples():
    tri = dual_subdivision(LINE)
    assert len(tri.cells) == 1 and len(tri.cells[0].vertices) == 3
    minus = dual_subdivision(catalog.hyperbola_tropical(-1))
    assert sorted(sorted(c.vertices) for c in minus.cells) == [[(0, 0), (0, 1), (1, 0)], [(0, 1), (1, 0), (1, 1)]]
    plus = dual_subdivision(catalog.hyperbola_tropical(1))
    assert sorted(sorted(c.vertices) for c in plus.cells) == [[(0, 0), (0, 1), (1, 1)], [(0, 0), (1, 0), (1, 1)]]


def test_lifting_is_negated_coefficient():
    tau = dual_subdivision(catalog.hyperbola_tropical(-1))
    assert tau.lifting[(0, 0)] == 1


def test_smoothness():
    assert is_smooth(corner_locus(LINE))
    assert not is_smooth(corner_locus(catalog.hyperbola_tropical(0)))
    cubic = corner_locus(smooth_plane_curve(3))
    assert is_smooth(cubic) and len(cubic.dual.cells) == 9


def test_float_coefficients_are_snapped():
    G = corner_locus(TropicalPolynomial({(0, 0): 0.1 + 1e-9, (1, 0): 0.0, (0, 1): 0.0}))
    assert 0 < G.snap_error < 1e-8
    assert G.source.terms[(0, 0)] == Fraction(1, 10)


def test_format_roundtrip_text():
    assert format_tropical(catalog.hyperbola_tropical(-1)) == "max{-1, y, x, x+y}"


def test_standard_plane_counts():
    G = corner_locus(standard_hyperplane(3))
    assert G.counts()["dim0"] == 1
    assert G.counts()["dim1"] == 4
    assert G.counts()["dim2"] == 6
    assert balancing_check(G)


# property tests

@st.composite
def tropical_polynomials(draw, max_dim=3, max_terms=8):
    n = draw(st.integers(1, max_dim))
    exps = draw(st.lists(st.tuples(*[st.integers(0, 2)] * n), min_size=2, max_size=max_terms, unique=True))
    return TropicalPolynomial({a: Fraction(draw(st.integers(-6, 6)), draw(st.integers(1, 3))) for a in exps})


points = st.lists(st.fractions(-4, 4, max_denominator=6), min_size=3, max_size=3)


@settings(max_examples=60, deadline=None)
@given(tropical_polynomials())
def test_balancing_holds_for_every_corner_locus(F):
    assert balancing_check(corner_locus(F))


@settings(max_examples=60, deadline=None)
@given(tropical_polynomials())
def test_duality_dimension_identity(F):
    G = corner_locus(F)
    for c in G.cells:
        assert c.dim + c.dual_dim == G.ambient_dim


@settings(max_examples=60, deadline=None)
@given(tropical_polynomials(), points, points, st.fractions(0, 1, max_denominator=10))
def test_evaluation_is_convex(F, x, y, lam):
    n = F.ambient_dim
    x, y = x[:n], y[:n]
    mid = [lam * a + (1 - lam) * b for a, b in zip(x, y)]
    assert F(mid) <= lam * F(x) + (1 - lam) * F(y)


@settings(max_examples=40, deadline=None)
@given(tropical_polynomials(max_dim=2), points)
def test_membership_iff_tie(F, x):
    G = corner_locus(F)
    x = x[: F.ambient_dim]
    tie = len(trop_eval(F, x)[1]) >= 2
    assert G.contains(x) == tie
    if tie:
        assert G.locate(x) is not None or len(trop_eval(F, x)[1] & G.dual.lower_points()) < 2
    for c in G.cells:
        assert len(trop_eval(F, c.interior_point())[1]) >= 2


@settings(max_examples=40, deadline=None)
@given(tropical_polynomials(max_dim=3))
def test_smooth_vertices_have_valence_n_plus_one(F):
    G = corner_locus(F)
    n = G.ambient_dim
    if n < 2 or not is_smooth(G):
        return
    for v in G.vertices:
        edges = [c for c in G.cells_of_dim(1) if v.active_terms > c.active_terms]
        assert len(edges) == n + 1
