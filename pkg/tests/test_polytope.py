from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasetrop.polytope import (
    Polytope,
    is_smooth_subdivision,
    newton_polytope,
    normalized_volume,
    regular_subdivision,
)

SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]
TRIANGLE = [(0, 0), (1, 0), (0, 1)]


def cells_of(tau):
    return sorted(tuple(sorted(c.vertices)) for c in tau.cells)


def test_triangle_hull():
    P = newton_polytope(TRIANGLE)
    assert P.vertices == frozenset(TRIANGLE)
    assert P.dim == 2 and P.ambient_dim == 2


def test_collinear_point_absorbed():
    P = newton_polytope([(0, 0), (2, 0), (1, 0)])
    assert P.vertices == {(0, 0), (2, 0)}
    assert P.dim == 1


def test_hyperbola_support_is_unit_square():
    assert newton_polytope(SQUARE).sorted_vertices == sorted(SQUARE)


def test_empty_support():
    with pytest.raises(ValueError, match="empty support"):
        newton_polytope([])


def test_flat_lifting_gives_one_cell():
    tau = regular_subdivision(SQUARE, {p: 0 for p in SQUARE})
    assert cells_of(tau) == [tuple(sorted(SQUARE))]


def test_lowered_corner_folds_along_main_diagonal():
    # (0,0) lifted below the plane through the other three corners: the lower hull
    # creases along (0,0)-(1,1), never along (1,0)-(0,1)
    nu = {(0, 0): -1, (1, 0): 0, (0, 1): 0, (1, 1): 0}
    tau = regular_subdivision(SQUARE, nu)
    assert cells_of(tau) == [((0, 0), (0, 1), (1, 1)), ((0, 0), (1, 0), (1, 1))]


def test_raised_corner_folds_along_antidiagonal():
    nu = {(0, 0): 1, (1, 0): 0, (0, 1): 0, (1, 1): 0}
    tau = regular_subdivision(SQUARE, nu)
    assert cells_of(tau) == [((0, 0), (0, 1), (1, 0)), ((0, 1), (1, 0), (1, 1))]
    assert tau.functional(tau.cells[0]) == ((Fraction(-1), Fraction(-1)), Fraction(1))


def test_flat_simplex_functional():
    tau = regular_subdivision(TRIANGLE, {p: 0 for p in TRIANGLE})
    assert len(tau.cells) == 1
    assert tau.functionals[0] == ((0, 0), 0)


def test_missing_lifting_value():
    with pytest.raises(ValueError):
        regular_subdivision(SQUARE, {(0, 0): 0})


@pytest.mark.parametrize("pts, vol", [
    (TRIANGLE, Fraction(1, 2)),
    (SQUARE, Fraction(1)),
    ([(0, 0), (2, 0), (0, 1)], Fraction(1)),
    ([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], Fraction(1, 6)),
    ([(0,), (3,)], Fraction(3)),
])
def test_normalized_volume(pts, vol):
    assert normalized_volume(newton_polytope(pts)) == vol


def test_degenerate_cell():
    with pytest.raises(ValueError, match="degenerate cell"):
        normalized_volume(newton_polytope([(0, 0), (1, 1)]))


def test_smoothness_examples():
    split = regular_subdivision(SQUARE, {(0, 0): 1, (1, 0): 0, (0, 1): 0, (1, 1): 0})
    assert is_smooth_subdivision(split)
    assert not is_smooth_subdivision(regular_subdivision(SQUARE, {p: 0 for p in SQUARE}))
    big = [(0, 0), (2, 0), (0, 1)]
    assert not is_smooth_subdivision(regular_subdivision(big, {p: 0 for p in big}))


def test_marked_points_kept_on_cells():
    pts = [(0, 0), (1, 0), (2, 0), (0, 1)]
    tau = regular_subdivision(pts, {p: 0 for p in pts})
    assert len(tau.cells) == 1
    assert tau.cells[0].points == frozenset(pts)
    assert tau.cells[0].vertices == {(0, 0), (2, 0), (0, 1)}


def test_contains_and_lattice_points():
    P = newton_polytope([(0, 0), (2, 0), (0, 2)])
    assert P.contains((1, 1)) and not P.contains((2, 1))
    assert P.contains((Fraction(1, 2), Fraction(3, 2)))
    assert len(P.lattice_points()) == 6


# property tests

coords = st.integers(-2, 2)


@st.composite
def lifted_configuration(draw, max_dim=3):
    n = draw(st.integers(1, max_dim))
    pts = draw(st.lists(st.tuples(*[coords] * n), min_size=n + 1, max_size=7, unique=True))
    nu = {p: Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 3))) for p in pts}
    return pts, nu


@settings(max_examples=60, deadline=None)
@given(lifted_configuration())
def test_volumes_add_up(cfg):
    pts, nu = cfg
    tau = regular_subdivision(pts, nu)
    if tau.polytope.dim < len(pts[0]):
        return
    assert sum(normalized_volume(c) for c in tau.cells) == normalized_volume(tau.polytope)


@settings(max_examples=60, deadline=None)
@given(lifted_configuration())
def test_functionals_support_the_lift_from_below(cfg):
    pts, nu = cfg
    tau = regular_subdivision(pts, nu)
    for cell, (a, b) in zip(tau.cells, tau.functionals):
        for p in pts:
            h = sum(x * y for x, y in zip(p, a)) + b
            assert h <= nu[p]
            if p in cell.points:
                assert h == nu[p]


@settings(max_examples=40, deadline=None)
@given(lifted_configuration(max_dim=2))
def test_single_cell_resubdivision_is_idempotent(cfg):
    pts, nu = cfg
    tau = regular_subdivision(pts, nu)
    cell = tau.cells[0]
    a, b = tau.functionals[0]
    own = {p: sum(x * y for x, y in zip(p, a)) + b for p in cell.points}
    again = regular_subdivision(cell.points, own)
    assert len(again.cells) == 1
    assert again.cells[0].points == cell.points


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coords, coords, coords), min_size=1, max_size=8, unique=True), st.randoms())
def test_hull_ignores_input_order(pts, rnd):
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    assert newton_polytope(pts) == newton_polytope(shuffled)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coords, coords), min_size=3, max_size=8, unique=True))
def test_vertices_are_extreme(pts):
    P = newton_polytope(pts)
    for v in P.vertices:
        rest = [p for p in P.vertices if p != v]
        if rest:
            assert not Polytope.from_points(rest).contains(v)
