import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasetrop import catalog
from phasetrop.amoeba import (
    ComplexPolynomial,
    PointCloud,
    SamplingConfig,
    ViroFamily,
    h_t,
    hausdorff_distance,
    line_coamoeba_complement,
    localization_check,
    log_t,
    order_map,
    pr_function,
    rescale_phi,
    ronkin_coefficient,
    sample_hypersurface,
    spine,
    truncate,
    viro_family,
)
from phasetrop.polytope import regular_subdivision
from phasetrop.puiseux import kapranov_tropicalize
from phasetrop.tropical import corner_locus, standard_hyperplane

LINE = catalog.complex_line(2)
GAMMA_LINE = corner_locus(standard_hyperplane(2))


def test_log_t_examples():
    t = 7.0
    assert np.allclose(log_t([t, t * t], t), [1, 2])
    assert np.allclose(log_t([1, 1, 1], t), 0)
    z = [2 + 1j, 0.5j]
    assert np.allclose(log_t(z, math.e), np.log(np.abs(z)))


def test_h_t_examples():
    t = 50.0
    assert abs(abs(h_t(t, t)) - math.e) < 1e-12
    z = 3 * np.exp(0.7j)
    assert abs(np.angle(h_t(z, t)) - 0.7) < 1e-12
    assert np.allclose(np.abs(h_t([2.0, 0.3j], math.e)), [2.0, 0.3])


def test_t_must_exceed_one():
    with pytest.raises(ValueError):
        log_t([1.0], 1.0)
    with pytest.raises(ValueError):
        h_t([1.0], 0.5)


@settings(max_examples=50, deadline=None)
# t >= 1.5 keeps |h_t(z)| = |z|^(1/log t) representable for |log|z|| <= 30
@given(st.floats(1.5, 1e8), st.lists(st.floats(-30, 30), min_size=2, max_size=2),
       st.lists(st.floats(0, 6.28), min_size=2, max_size=2))
def test_log_of_h_t_is_log_t(t, logs, args):
    z = np.exp(np.array(logs)) * np.exp(1j * np.array(args))
    assert np.allclose(np.log(np.abs(h_t(z, t))), np.log(np.abs(z)) / math.log(t), atol=1e-12, rtol=0)


@settings(max_examples=30, deadline=None)
@given(st.floats(1.5, 1e6), st.lists(st.floats(-3, 3), min_size=2, max_size=2),
       st.lists(st.floats(-2, 2), min_size=2, max_size=2))
def test_rescale_phi_shifts_log_t(t, x, a):
    z = np.power(t, np.array(x)) * np.exp(1j * np.array([0.4, 2.0]))
    assert np.allclose(log_t(rescale_phi(z, a, t), t), np.array(x) + np.array(a), atol=1e-9)


def test_viro_family_evaluation():
    f = catalog.hyperbola_family().evaluate_at(math.e)
    assert abs(f.terms[(0, 0)] - math.exp(-1)) < 1e-15
    assert all(f.terms[a] == 1 for a in [(1, 0), (0, 1), (1, 1)])
    flat = ViroFamily({a: 2.0 for a in catalog.SQUARE}, {a: 0 for a in catalog.SQUARE})
    assert flat.evaluate_at(10.0).terms == flat.evaluate_at(1e6).terms


def test_viro_family_from_lifting():
    fam = viro_family({a: 1 for a in catalog.SQUARE}, {(0, 0): 1, (1, 0): 0, (0, 1): 0, (1, 1): 0})
    assert fam.exponents == catalog.hyperbola_family().exponents


def test_viro_family_puiseux_reading():
    fam = catalog.hyperbola_family()
    literal = kapranov_tropicalize(fam.as_puiseux())
    assert literal.terms == {a: -Fraction(e) for a, e in fam.exponents.items()}
    assert kapranov_tropicalize(fam.as_puiseux(inverse_parameter=True)) == fam.tropical_limit()


def test_truncations():
    fam = catalog.hyperbola_family()
    assert truncate(LINE, [(1, 0)]).terms == {(1, 0): 1}
    low = truncate(fam, catalog.LOWER_TRIANGLE)
    assert low.support == {(0, 0), (1, 0), (0, 1)}
    assert low.exponents[(0, 0)] == -1
    tau = fam.subdivision()
    for cell in tau.cells:
        assert truncate(fam, cell).support == fam.support & cell.points


def test_line_cloud_residuals_and_box():
    c = sample_hypersurface(LINE, math.e, 3.0, 2000, seed=1)
    assert c.space == "phase" and len(c) == 2000
    z = np.exp(c.points[:, :2] + 1j * c.points[:, 2:])
    assert np.abs(LINE(z)).max() < 1e-8
    assert LINE.relative_residual(z).max() < 1e-8
    assert np.all(np.abs(c.points[:, :2]) <= 3.0)
    assert np.all((c.points[:, 2:] >= 0) & (c.points[:, 2:] < 2 * math.pi))
    assert c.meta["t"] == math.e and c.meta["seed"] == 1


def test_sampling_is_deterministic_and_worker_independent():
    a = sample_hypersurface(LINE, 10.0, 3.0, 5000, seed=4)
    b = sample_hypersurface(LINE, 10.0, 3.0, 5000, seed=4)
    c = sample_hypersurface(LINE, 10.0, 3.0, 5000, seed=4, config=SamplingConfig(workers=4))
    assert np.array_equal(a.points, b.points) and np.array_equal(a.points, c.points)
    assert not np.array_equal(a.points, sample_hypersurface(LINE, 10.0, 3.0, 5000, seed=5).points)


def test_sampling_errors():
    with pytest.raises(ValueError, match="empty cloud"):
        sample_hypersurface(LINE, math.e, 3.0, 0, seed=0)
    with pytest.raises(ValueError, match="last variable"):
        sample_hypersurface(ComplexPolynomial({(0, 0): 1, (1, 0): 1}), math.e, 3.0, 10, seed=0)


def test_parabola_cloud_snapshot():
    c = sample_hypersurface(catalog.parabola(2.0), math.e, 3.0, 1000, seed=0)
    assert len(c) == 1000 and c.meta["rejected"] == 0
    assert np.allclose(c.points[0], [0.21431204, -1.10197709, 0.7567871, 5.75037774], atol=1e-7)


def test_line_amoeba_hausdorff_bound_at_e():
    c = sample_hypersurface(LINE, math.e, 3.0, 20000, seed=0)
    d = hausdorff_distance(c.log_part(), GAMMA_LINE, 3.0)
    assert d <= 0.7
    assert abs(d - 0.691266) < 1e-5


def test_line_amoeba_converges():
    c = sample_hypersurface(LINE, 1e6, 3.0, 20000, seed=0)
    assert hausdorff_distance(c.log_part(), GAMMA_LINE, 3.0) <= 0.05


def test_hyperbola_ladder_regression():
    fam = catalog.hyperbola_family()
    G = corner_locus(fam.tropical_limit())
    got = [hausdorff_distance(sample_hypersurface(fam, t, 3.0, 20000, seed=0).log_part(), G, 3.0)
           for t in (10.0, 1e2, 1e3, 1e6)]
    assert np.allclose(got, [0.2855532, 0.1452778, 0.0997675, 0.0484686], atol=1e-6)


def test_hausdorff_basics():
    X = PointCloud("log", np.random.default_rng(0).normal(size=(50, 2)))
    assert hausdorff_distance(X, X) == 0
    assert hausdorff_distance(PointCloud("log", [[0.0]]), PointCloud("log", [[1.0]])) == 1
    with pytest.raises(ValueError):
        hausdorff_distance(PointCloud("log", np.empty((0, 2))), X)


def test_hausdorff_to_complex_is_exact_on_the_complex():
    # the vertex and three far ray points: the cloud is within 0 of Gamma,
    # but Gamma's ray points are far from the cloud
    X = PointCloud("log", [[0.0, 0.0], [3.0, 3.0], [-3.0, 0.0], [0.0, -3.0]])
    d = hausdorff_distance(X, GAMMA_LINE, 3.0)
    assert abs(d - 1.5 * math.sqrt(2)) < 2e-3


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hausdorff_is_a_metric_on_clouds(seed):
    rng = np.random.default_rng(seed)
    A, B, C = (PointCloud("log", rng.normal(size=(int(rng.integers(1, 30)), 2))) for _ in range(3))
    ab, ba = hausdorff_distance(A, B), hausdorff_distance(B, A)
    assert ab == ba
    assert ab <= hausdorff_distance(A, C) + hausdorff_distance(C, B) + 1e-12


def test_ronkin_coefficients():
    mono = ComplexPolynomial({(2, 1): 1 + 1j})
    c, e = ronkin_coefficient(mono, (2, 1), (0.3, -0.7), N=1000, seed=0)
    assert abs(c - math.log(abs(1 + 1j))) < 1e-12 and e < 1e-12
    c, e = ronkin_coefficient(LINE, (0, 0), (-10, -10), N=10**5, seed=0)
    assert abs(c) <= 3 * e + 1e-12
    c, e = ronkin_coefficient(LINE, (1, 0), (10, 0), N=10**5, seed=0)
    assert abs(c) <= 3 * e + 1e-12


def test_ronkin_agrees_within_a_component():
    c1, e1 = ronkin_coefficient(LINE, (1, 0), (4.0, 0.5), N=10**5, seed=1)
    c2, e2 = ronkin_coefficient(LINE, (1, 0), (9.0, -2.0), N=10**5, seed=2)
    assert abs(c1 - c2) <= 3 * (e1 + e2)


def test_orders():
    assert order_map(LINE, (-10, -10)) == (0, 0)
    assert order_map(LINE, (10, 0)) == (1, 0)
    mono = ComplexPolynomial({(3, -1): 2.0})
    assert order_map(mono, (0.5, 0.5)) == (3, -1)
    for x in [(-4, -3), (-8, -1), (-2, -6), (-5, -5), (-12, -2)]:
        assert order_map(LINE, x) == (0, 0)
    for x in [(4, 1), (6, 5), (9, -3), (3, 0), (20, 10)]:
        assert order_map(LINE, x) == (1, 0)


def test_order_near_the_amoeba_is_ambiguous():
    with pytest.raises(ValueError, match="ambiguous order"):
        order_map(LINE, (0.0, 0.0))


def test_line_spine():
    s = spine(LINE, N=10**5, seed=0)
    assert all(abs(c) <= 0.02 for c, _ in s.coefficients.values())
    assert s.spine.terms == {a: c for a, (c, _) in s.coefficients.items()}
    assert s.corner_locus().counts()["dim0"] == 1


def test_hyperbola_spine_combinatorics():
    lam = 0.3
    s = spine(catalog.hyperbola(lam), N=10**5, seed=0)
    c00, e00 = s.coefficients[(0, 0)]
    assert abs(c00 - math.log(lam)) <= 3 * e00 + 0.02
    G = s.corner_locus()
    assert G.counts() == {"dim0": 2, "dim1": 5, "bounded_edges": 1, "unbounded_edges": 4}
    (edge,) = [c for c in G.cells_of_dim(1) if c.is_bounded]
    assert edge.dual == {(1, 0), (0, 1)}


def test_single_monomial_spine():
    with pytest.raises(ValueError, match="no corner locus"):
        spine(ComplexPolynomial({(1, 1): 1.0}), N=100, seed=0)


def test_spine_is_seed_deterministic():
    a = spine(LINE, N=10**4, seed=3).coefficients
    b = spine(LINE, N=10**4, seed=3).coefficients
    assert a == b


def test_pr_function_keeps_spine_orders():
    s = spine(catalog.hyperbola(0.3), N=10**4, seed=0)
    nu0 = {a: -c for a, (c, _) in s.coefficients.items()}
    tau = regular_subdivision(list(nu0), nu0)
    assert pr_function(s, tau, {}, []) == nu0


def test_pr_function_marked_point():
    # 1 + 2z + z^2 + w has the marked point (1, 0) on the segment [(0,0),(2,0)]
    f = ComplexPolynomial({(0, 0): 1, (2, 0): 1, (0, 1): 1, (1, 0): 0.5})
    s = spine(f, N=10**4, seed=0, check_orders=False,
              probes={(0, 0): (-10, -10), (2, 0): (10, -5), (0, 1): (-5, 10)})
    nu0 = {a: -c for a, (c, _) in s.coefficients.items()}
    tau = regular_subdivision(list(nu0), nu0)
    (a, b) = tau.functionals[0]
    at = sum(x * y for x, y in zip((1, 0), a)) + b
    zero = pr_function(s, tau, {(1, 0): 0}, [0.0])
    assert abs(float(zero[(1, 0)]) - float(at)) < 1e-12
    lifted = pr_function(s, tau, {(1, 0): 0}, [0.5])
    assert abs(float(lifted[(1, 0)]) - float(at) - 0.5) < 1e-12
    sub = regular_subdivision(list(lifted), lifted)
    assert len(sub.cells) == len(tau.cells)
    assert sorted(map(sorted, (c.vertices for c in sub.cells))) == sorted(map(sorted, (c.vertices for c in tau.cells)))
    with pytest.raises(ValueError):
        pr_function(s, tau, {(5, 5): 0}, [0.1])


def test_localization_on_lower_triangle():
    fam = catalog.hyperbola_family()
    rep = localization_check(fam, catalog.LOWER_TRIANGLE, r=0.5, eps=0.1, samples=2000, seed=0)
    assert rep.passed and rep.monotone
    assert rep.center == (-1.0, -1.0)
    assert np.allclose(rep.max_distance, [0.15198655, 0.04922012, 0.01143332, 0.00012557], atol=1e-7)
    far = localization_check(fam, catalog.LOWER_TRIANGLE, r=0.5, eps=0.1, samples=2000, seed=0, center=(0, 0))
    assert rep.max_distance[-1] <= far.max_distance[-1]
    assert not far.passed


def test_coamoeba_of_phased_line_avoids_the_complement():
    alpha = catalog.LINE_PHASES
    c = sample_hypersurface(catalog.phased_line(alpha), math.e, 3.0, 5000, seed=2)
    assert not line_coamoeba_complement(c.arg_part().points, alpha).any()


def _complement_oracle(theta, alpha):
    # the three terms e^{i(a_k + theta_k)} have a zero positive combination
    # unless they lie in an open half-plane
    phases = np.array([alpha[0] + theta[0], alpha[1] + theta[1], alpha[2]])
    psi = np.linspace(0, 2 * np.pi, 20001)
    return bool(np.any(np.all(np.cos(phases[:, None] - psi[None, :]) > 1e-9, axis=0)))


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_coamoeba_complement_matches_half_plane_oracle(a, b):
    alpha = catalog.LINE_PHASES
    theta = np.array([[a, b]])
    got = bool(line_coamoeba_complement(theta, alpha)[0])
    # skip points within a hair of the boundary lines, where the grid scan is unreliable
    phases = np.array([alpha[0] + a, alpha[1] + b, alpha[2]])
    gaps = np.sort(np.mod(phases, 2 * math.pi))
    gaps = np.diff(np.concatenate([gaps, gaps[:1] + 2 * math.pi]))
    if abs(gaps.max() - math.pi) < 1e-3:
        return
    assert got == _complement_oracle((a, b), alpha)


def test_rescaled_spines_approach_the_tropical_limit():
    from phasetrop.tropical import TropicalPolynomial

    fam = catalog.hyperbola_family()
    limit = corner_locus(fam.tropical_limit())
    errors = []
    for t in (10.0, 1e3, 1e6):
        L = math.log(t)
        s = spine(fam.evaluate_at(t), N=10**4, seed=0, probe_scale=10 * L)
        scaled = corner_locus(TropicalPolynomial({a: c / L for a, (c, _) in s.coefficients.items()}))
        assert scaled.counts() == limit.counts()
        # rays are parallel, so the vertex displacement bounds the Hausdorff error of the complexes
        verts = [PointCloud("log", [[float(v) for v in c.points[0]] for c in G.vertices]) for G in (scaled, limit)]
        errors.append(hausdorff_distance(*verts))
    assert all(b <= a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 1e-4
