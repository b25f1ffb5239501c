"""Numerical amoebas: sampling, Hausdorff distances, spines and localization.

Conventions. ``t > 1`` throughout and ``Log_t(z) = log|z| / log t``. A
``ViroFamily`` stores a t-exponent per term, so its coefficient at ``t`` is
``xi * t**exponent``; as ``t -> infinity`` the ``Log_t`` amoebas converge to
the corner locus of ``max{exponent(a) + <a, x>}`` (``tropical_limit``).
Phase-space points are ``(Log_t z, arg z)`` with arguments in ``[0, 2pi)``.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .polytope import Polytope, RegularSubdivision, newton_polytope, regular_subdivision
from .puiseux import PuiseuxPolynomial, PuiseuxSeries
from .roots import batch_roots
from .tropical import TropicalHypersurface, TropicalPolynomial, corner_locus

TWO_PI = 2 * math.pi
RESIDUAL_TOL = 1e-8
DEFAULT_BOX = 3.0
DEFAULT_MC = 10**5
CHUNK = 2048


@dataclass(frozen=True, eq=False)
class ComplexPolynomial:
    terms: Mapping

    def __post_init__(self):
        clean = {tuple(int(e) for e in a): complex(c) for a, c in self.terms.items() if c != 0}
        if not clean:
            raise ValueError("polynomial has no terms")
        if len({len(a) for a in clean}) != 1:
            raise ValueError("exponents must share one ambient dimension")
        object.__setattr__(self, "terms", clean)

    @property
    def ambient_dim(self) -> int:
        return len(next(iter(self.terms)))

    @property
    def support(self) -> frozenset:
        return frozenset(self.terms)

    def _arrays(self):
        alphas = np.array(sorted(self.terms), dtype=float)
        coeffs = np.array([self.terms[tuple(int(v) for v in a)] for a in alphas], dtype=complex)
        return alphas, coeffs

    def monomials(self, z) -> np.ndarray:
        """Term values ``a_alpha z^alpha``, shape ``(..., #terms)``."""
        z = np.asarray(z, dtype=complex)
        alphas, coeffs = self._arrays()
        logz = np.log(z)
        return coeffs * np.exp(logz @ alphas.T)

    def __call__(self, z) -> np.ndarray:
        return self.monomials(z).sum(axis=-1)

    def relative_residual(self, z) -> np.ndarray:
        m = self.monomials(z)
        return np.abs(m.sum(axis=-1)) / np.abs(m).sum(axis=-1)

    def depends_on(self, j: int) -> bool:
        return len({a[j] for a in self.terms}) > 1


@dataclass(frozen=True, eq=False)
class ViroFamily:
    base: Mapping
    exponents: Mapping

    def __post_init__(self):
        base = {tuple(int(e) for e in a): complex(c) for a, c in self.base.items()}
        exps = {tuple(int(e) for e in a): (Fraction(v) if isinstance(v, (int, Fraction)) else float(v))
                for a, v in self.exponents.items()}
        if set(base) != set(exps):
            raise ValueError("base and exponents must share one support")
        if any(c == 0 for c in base.values()):
            raise ValueError("zero base coefficient")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponents", exps)

    @property
    def ambient_dim(self) -> int:
        return len(next(iter(self.base)))

    @property
    def support(self) -> frozenset:
        return frozenset(self.base)

    def evaluate_at(self, t: float) -> ComplexPolynomial:
        _check_t(t)
        return ComplexPolynomial({a: c * float(t) ** float(self.exponents[a]) for a, c in self.base.items()})

    def tropical_limit(self) -> TropicalPolynomial:
        """Limit of the ``Log_t`` amoebas: ``max{exponent(a) + <a, x>}``."""
        return TropicalPolynomial(dict(self.exponents))

    def subdivision(self) -> RegularSubdivision:
        """Dual subdivision of the limit, i.e. the lifting ``nu = -exponent``."""
        exact = self.tropical_limit().snapped()[0]
        return regular_subdivision(exact.support, {a: -c for a, c in exact.terms.items()})

    def as_puiseux(self, inverse_parameter: bool = False) -> PuiseuxPolynomial:
        """The family read as a polynomial over Puiseux series in ``t``.

        The literal reading ``xi t^exponent`` has ``val = -exponent``. With
        ``inverse_parameter`` the series variable is ``1/t``, so that
        ``val = exponent`` and the Kapranov tropicalization equals
        ``tropical_limit``.
        """
        sign = -1 if inverse_parameter else 1
        return PuiseuxPolynomial(
            {a: PuiseuxSeries.monomial(c, sign * Fraction(self.exponents[a])) for a, c in self.base.items()}
        )

    def truncate(self, cell) -> "ViroFamily":
        keep = _cell_points(cell, self.support)
        return ViroFamily({a: self.base[a] for a in keep}, {a: self.exponents[a] for a in keep})


def viro_family(base: Mapping, lifting: Mapping) -> ViroFamily:
    """Patchworking family ``sum xi_a t^(-nu(a)) z^a``."""
    return ViroFamily(base, {a: -Fraction(v) if isinstance(v, (int, Fraction)) else -float(v) for a, v in lifting.items()})


def _check_t(t):
    if not t > 1:
        raise ValueError(f"t must exceed 1, got {t}")


def _cell_points(cell, support) -> list:
    if isinstance(cell, Polytope):
        return sorted(a for a in support if cell.contains(a))
    pts = frozenset(tuple(p) for p in cell)
    poly = Polytope.from_points(pts)
    return sorted(a for a in support if poly.contains(a))


def truncate(f, cell):
    """Restriction of ``f`` to the lattice points of ``cell`` (marked points kept)."""
    if isinstance(f, ViroFamily):
        return f.truncate(cell)
    keep = _cell_points(cell, f.support)
    if not keep:
        raise ValueError("cell contains no term of f")
    return ComplexPolynomial({a: f.terms[a] for a in keep})


def log_t(z, t: float) -> np.ndarray:
    _check_t(t)
    return np.log(np.abs(np.asarray(z, dtype=complex))) / math.log(t)


def h_t(z, t: float) -> np.ndarray:
    """Self-map of the torus with ``Log(h_t(z)) = Log(z) / log t``; arguments kept."""
    _check_t(t)
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    return r ** (1.0 / math.log(t)) * np.exp(1j * np.angle(z))


def rescale_phi(z, a_v: Sequence, t: float) -> np.ndarray:
    """``(z_1 t^{a_1}, ..., z_n t^{a_n})``, so ``log_t`` shifts by ``a_v``."""
    _check_t(t)
    z = np.asarray(z, dtype=complex)
    return z * np.power(float(t), np.asarray([float(a) for a in a_v]))


@dataclass
class PointCloud:
    space: str
    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.space not in ("log", "arg", "phase"):
            raise ValueError(f"unknown space {self.space!r}")
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("points must be a 2-D array")

    @property
    def n(self) -> int:
        d = self.points.shape[1]
        return d // 2 if self.space == "phase" else d

    def __len__(self):
        return len(self.points)

    def log_part(self) -> "PointCloud":
        if self.space == "arg":
            raise ValueError("argument cloud has no log part")
        return PointCloud("log", self.points[:, : self.n], dict(self.meta))

    def arg_part(self) -> "PointCloud":
        if self.space == "log":
            raise ValueError("log cloud has no argument part")
        return PointCloud("arg", self.points[:, -self.n:], dict(self.meta))


def _as_box(box, n) -> np.ndarray:
    if box is None:
        box = DEFAULT_BOX
    if np.isscalar(box):
        arr = np.array([[-float(box), float(box)]] * n)
    else:
        arr = np.asarray(box, dtype=float).reshape(n, 2)
    if np.any(arr[:, 1] <= arr[:, 0]):
        raise ValueError("degenerate box")
    return arr


@dataclass(frozen=True)
class SamplingConfig:
    residual_tol: float = RESIDUAL_TOL
    chunk: int = CHUNK
    max_draws_factor: int = 50
    workers: int = 1
    random_role: bool = True


def _slice_roots(f: ComplexPolynomial, j: int, z_free: np.ndarray) -> np.ndarray:
    """Roots in variable ``j`` with the other coordinates fixed, shape ``(m, deg)``."""
    alphas = sorted(f.terms)
    low = min(a[j] for a in alphas)
    deg = max(a[j] for a in alphas) - low
    m = z_free.shape[0]
    coeffs = np.zeros((m, deg + 1), dtype=complex)
    logz = np.log(z_free)
    for a in alphas:
        e = np.array([a[i] if i != j else 0 for i in range(len(a))], dtype=float)
        coeffs[:, a[j] - low] += f.terms[a] * np.exp(logz @ e)
    # rows with a vanishing end coefficient lose roots at 0 or infinity
    ok = (coeffs[:, 0] != 0) & (coeffs[:, -1] != 0) & np.all(np.isfinite(coeffs), axis=1)
    out = np.full((m, deg), np.nan + 0j)
    if ok.any():
        out[ok] = batch_roots(coeffs[ok])
    return out


def _sample_chunk(f: ComplexPolynomial, t: float, box: np.ndarray, m: int, ss: np.random.SeedSequence,
                  roles: list[int], cfg: SamplingConfig) -> tuple[np.ndarray, int]:
    rng = np.random.default_rng(ss)
    n = f.ambient_dim
    logt = math.log(t)
    u = rng.uniform(box[:, 0], box[:, 1], size=(m, n))
    th = rng.uniform(0, TWO_PI, size=(m, n))
    role = rng.choice(roles, size=m) if cfg.random_role else np.full(m, roles[-1])
    pts = []
    rejected = 0
    for j in roles:
        rows = np.where(role == j)[0]
        if rows.size == 0:
            continue
        z = np.exp(u[rows] * logt + 1j * th[rows])
        r = _slice_roots(f, j, z)
        deg = r.shape[1]
        zz = np.repeat(z, deg, axis=0)
        zz[:, j] = r.reshape(-1)
        good = np.isfinite(zz[:, j]) & (zz[:, j] != 0)
        zz = zz[good]
        lu = np.log(np.abs(zz)) / logt
        inside = np.all((lu >= box[:, 0]) & (lu <= box[:, 1]), axis=1)
        zz, lu = zz[inside], lu[inside]
        res = f.relative_residual(zz)
        keep = res <= cfg.residual_tol
        rejected += int((~keep).sum())
        pts.append(np.hstack([lu[keep], np.mod(np.angle(zz[keep]), TWO_PI)]))
    if not pts:
        return np.empty((0, 2 * n)), rejected
    return np.vstack(pts), rejected


def sample_hypersurface(f, t: float, box=None, k: int = 1000, seed=0,
                        config: SamplingConfig = SamplingConfig()) -> PointCloud:
    """Up to ``k`` points of ``V(f)`` in phase coordinates over a ``Log_t`` box.

    Each slice fixes all but one coordinate (log_t uniform in the box, argument
    uniform) and solves the univariate remainder. The solved coordinate is
    drawn uniformly among the variables ``f`` depends on, so that every
    direction of the amoeba is swept. Slices are grouped in fixed-size chunks
    with seeds spawned from ``seed``; the output does not depend on
    ``config.workers``.
    """
    if isinstance(f, ViroFamily):
        f = f.evaluate_at(t)
    _check_t(t)
    if k < 1:
        raise ValueError("empty cloud")
    n = f.ambient_dim
    roles = [j for j in range(n) if f.depends_on(j)]
    if not roles or not f.depends_on(n - 1):
        raise ValueError("polynomial does not depend on its last variable")
    box = _as_box(box, n)
    root = _seed_sequence(seed)
    max_chunks = config.max_draws_factor * (k // config.chunk + 1)
    got, rejected, next_chunk = [], 0, 0
    total = 0
    with ThreadPoolExecutor(max_workers=max(1, config.workers)) as pool:
        while total < k and next_chunk < max_chunks:
            batch = list(range(next_chunk, min(max_chunks, next_chunk + max(1, config.workers))))
            children = [_child(root, i) for i in batch]
            results = list(pool.map(lambda s: _sample_chunk(f, t, box, config.chunk, s, roles, config), children))
            for pts, rej in results:
                if total >= k:
                    break
                got.append(pts)
                total += len(pts)
                rejected += rej
            next_chunk = batch[-1] + 1
    pts = np.vstack(got)[:k] if got else np.empty((0, 2 * n))
    if len(pts) == 0:
        raise ValueError("empty cloud")
    meta = {"t": float(t), "seed": seed if isinstance(seed, int) else repr(root.spawn_key), "k": int(k), "box": box.tolist(), "rejected": rejected,
            "n": n}
    return PointCloud("phase", pts, meta)


def _seed_sequence(seed) -> np.random.SeedSequence:
    return seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)


def _child(root: np.random.SeedSequence, *key) -> np.random.SeedSequence:
    # fixed, order-independent partition of the seed space
    return np.random.SeedSequence(root.entropy, spawn_key=tuple(root.spawn_key) + tuple(key))


def hypersurface_segments(Gamma: TropicalHypersurface, box) -> list[tuple[np.ndarray, np.ndarray]]:
    """The 1-cells of a plane curve clipped to the box, as float segments."""
    if Gamma.ambient_dim != 2:
        raise ValueError("segments are only defined for plane curves")
    box = _as_box(box, 2)
    segs = []
    for c in Gamma.cells_of_dim(1):
        p = np.array([float(v) for v in c.points[0]])
        if c.lineality:
            d = np.array([float(v) for v in c.lineality[0]])
            lo, hi = -np.inf, np.inf
        elif c.rays:
            d = np.array([float(v) for v in c.rays[0]])
            lo, hi = 0.0, np.inf
        else:
            q = np.array([float(v) for v in c.points[1]])
            d = q - p
            lo, hi = 0.0, 1.0
        for i in range(2):
            if d[i] == 0:
                if not (box[i, 0] <= p[i] <= box[i, 1]):
                    lo, hi = 1.0, 0.0
                continue
            s1 = (box[i, 0] - p[i]) / d[i]
            s2 = (box[i, 1] - p[i]) / d[i]
            lo, hi = max(lo, min(s1, s2)), min(hi, max(s1, s2))
        if lo <= hi:
            segs.append((p + lo * d, p + hi * d))
    return segs


def _point_segment_dist(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    L2 = float(d @ d)
    if L2 == 0:
        return np.linalg.norm(pts - a, axis=1)
    s = np.clip((pts - a) @ d / L2, 0.0, 1.0)
    return np.linalg.norm(pts - (a + s[:, None] * d), axis=1)


def _cells_distance(pts: np.ndarray, Gamma: TropicalHypersurface, tol: float = 1e-9) -> np.ndarray:
    """Exact distance to the closed complex: projections onto affine hulls that
    land in their cell, plus all vertices (every cell's boundary is a union of cells)."""
    F = Gamma.source
    alphas = np.array(sorted(F.terms), dtype=float)
    coef = np.array([float(F.terms[tuple(int(v) for v in a)]) for a in alphas])
    index = {tuple(int(v) for v in a): i for i, a in enumerate(alphas)}
    best = np.full(len(pts), np.inf)
    for c in Gamma.cells:
        p0 = np.array([float(v) for v in c.points[0]])
        if c.dim == 0:
            best = np.minimum(best, np.linalg.norm(pts - p0, axis=1))
            continue
        B = np.array([[float(v) for v in b] for b in c.affine_basis]).T
        Q, _ = np.linalg.qr(B)
        proj = p0 + ((pts - p0) @ Q) @ Q.T
        vals = proj @ alphas.T + coef
        act = [index[a] for a in c.active_terms]
        inside = vals[:, act].min(axis=1) >= vals.max(axis=1) - tol * (1 + np.abs(vals).max(axis=1))
        dist = np.linalg.norm(pts - proj, axis=1)
        best = np.where(inside, np.minimum(best, dist), best)
    return best


def sample_complex(Gamma: TropicalHypersurface, box, step: float = 1e-3) -> np.ndarray:
    """Dense sample of ``Gamma`` inside the box (grid in each cell's affine chart)."""
    n = Gamma.ambient_dim
    box = _as_box(box, n)
    if n == 2:
        out = []
        for a, b in hypersurface_segments(Gamma, box):
            m = max(2, int(np.ceil(np.linalg.norm(b - a) / step)) + 1)
            s = np.linspace(0, 1, m)[:, None]
            out.append(a + s * (b - a))
        return np.vstack(out) if out else np.empty((0, 2))
    F = Gamma.source
    alphas = np.array(sorted(F.terms), dtype=float)
    coef = np.array([float(F.terms[tuple(int(v) for v in a)]) for a in alphas])
    index = {tuple(int(v) for v in a): i for i, a in enumerate(alphas)}
    diam = float(np.linalg.norm(box[:, 1] - box[:, 0]))
    out = []
    for c in Gamma.cells:
        p0 = np.array([float(v) for v in c.points[0]])
        if c.dim == 0:
            out.append(p0[None, :])
            continue
        B = np.array([[float(v) for v in b] for b in c.affine_basis]).T
        Q, _ = np.linalg.qr(B)
        center = box.mean(axis=1)
        s0 = (center - p0) @ Q
        m = max(3, int(diam / step) + 1)
        m = min(m, int(4e6 ** (1.0 / c.dim)))
        grids = np.meshgrid(*[np.linspace(s - diam, s + diam, m) for s in s0], indexing="ij")
        S = np.stack([g.reshape(-1) for g in grids], axis=1)
        P = p0 + S @ Q.T
        inbox = np.all((P >= box[:, 0]) & (P <= box[:, 1]), axis=1)
        P = P[inbox]
        vals = P @ alphas.T + coef
        act = [index[a] for a in c.active_terms]
        inside = vals[:, act].min(axis=1) >= vals.max(axis=1) - 1e-9 * (1 + np.abs(vals).max(axis=1))
        out.append(P[inside])
    return np.vstack(out)


def hausdorff_distance(A, B, box=None, step: float = 1e-3) -> float:
    """Hausdorff distance between a log cloud and a cloud or tropical hypersurface, in the box."""
    pa = _log_points(A)
    if len(pa) == 0:
        raise ValueError("empty set")
    n = pa.shape[1]
    box_arr = _as_box(box, n) if box is not None else None
    if box_arr is not None:
        pa = pa[np.all((pa >= box_arr[:, 0] - 1e-12) & (pa <= box_arr[:, 1] + 1e-12), axis=1)]
        if len(pa) == 0:
            raise ValueError("empty set")
    if isinstance(B, TropicalHypersurface):
        gb = box_arr if box_arr is not None else _as_box(DEFAULT_BOX, n)
        if n == 2:
            segs = hypersurface_segments(B, gb)
            if not segs:
                raise ValueError("empty set")
            d_ab = np.min(np.stack([_point_segment_dist(pa, a, b) for a, b in segs]), axis=0)
        else:
            d_ab = _cells_distance(pa, B)
        pb = sample_complex(B, gb, step)
        if len(pb) == 0:
            raise ValueError("empty set")
        d_ba, _ = cKDTree(pa).query(pb)
        return float(max(d_ab.max(), d_ba.max()))
    pb = _log_points(B)
    if box_arr is not None:
        pb = pb[np.all((pb >= box_arr[:, 0] - 1e-12) & (pb <= box_arr[:, 1] + 1e-12), axis=1)]
    if len(pb) == 0:
        raise ValueError("empty set")
    d_ab, _ = cKDTree(pb).query(pa)
    d_ba, _ = cKDTree(pa).query(pb)
    return float(max(d_ab.max(), d_ba.max()))


def _log_points(X) -> np.ndarray:
    if isinstance(X, PointCloud):
        return X.log_part().points if X.space != "log" else X.points
    arr = np.asarray(X, dtype=float)
    return arr[:, None] if arr.ndim == 1 else arr


def _fiber_values(f: ComplexPolynomial, x, N: int, rng, attempts: int = 5):
    n = f.ambient_dim
    x = np.asarray(x, dtype=float)
    for _ in range(attempts):
        th = rng.uniform(0, TWO_PI, size=(N, n))
        z = np.exp(x + 1j * th)
        mono = f.monomials(z)
        val = mono.sum(axis=1)
        if np.all(np.abs(val) > 1e-300):
            return z, mono, val
    raise ValueError("x not in complement")


def ronkin_coefficient(f: ComplexPolynomial, alpha, x, N: int = DEFAULT_MC, seed=0) -> tuple[float, float]:
    """Torus average of ``log|f(e^{x+i theta})| - <alpha, x>`` and its standard error."""
    if N < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    _, _, val = _fiber_values(f, x, N, rng)
    s = np.log(np.abs(val)) - float(np.dot(alpha, x))
    se = float(s.std(ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    return float(s.mean()), se


def order_estimate(f: ComplexPolynomial, x, N: int = 10**4, seed=0) -> tuple[np.ndarray, float]:
    """Torus averages of ``Re[z_j d_j f / f]`` and the largest rounding residual."""
    rng = np.random.default_rng(seed)
    _, mono, val = _fiber_values(f, x, N, rng)
    alphas = np.array(sorted(f.terms), dtype=float)
    est = np.real((mono @ alphas) / val[:, None]).mean(axis=0)
    return est, float(np.max(np.abs(est - np.round(est))))


def order_map(f: ComplexPolynomial, x, N: int = 10**4, seed=0, max_residual: float = 0.2) -> tuple:
    est, res = order_estimate(f, x, N, seed)
    if res > max_residual:
        raise ValueError("ambiguous order: point too close to amoeba")
    return tuple(int(v) for v in np.round(est))


@dataclass
class SpineResult:
    coefficients: dict
    spine: TropicalPolynomial
    probes: dict = field(default_factory=dict)

    def corner_locus(self, max_denominator: int = 10**6) -> TropicalHypersurface:
        return corner_locus(self.spine, max_denominator)


def default_probes(f: ComplexPolynomial, scale: float = 10.0) -> dict:
    """One probe per vertex of the Newton polytope, at ``scale * u``.

    ``u`` is the sum of the primitive outward normals of the facets through
    the vertex, a direction in the interior of its normal cone.
    """
    delta = newton_polytope(f.support)
    n = f.ambient_dim
    probes = {}
    for v in delta.sorted_vertices:
        u = [0] * n
        for nrm, verts in delta.outward_normals():
            if v in verts:
                u = [a + b for a, b in zip(u, nrm)]
        if all(c == 0 for c in u):
            raise ValueError("vertex has no outward direction")
        probes[v] = tuple(scale * c for c in u)
    return probes


def spine(f: ComplexPolynomial, probes: Mapping | None = None, N: int = DEFAULT_MC, seed=0,
          probe_scale: float = 10.0, check_orders: bool = True) -> SpineResult:
    """Monte-Carlo spine ``max{c_a + <a, x>}`` from one complement probe per order."""
    if len(f.terms) < 2:
        raise ValueError("no corner locus")
    probes = dict(probes) if probes is not None else default_probes(f, probe_scale)
    root = _seed_sequence(seed)
    seeds = [_child(root, i) for i in range(2 * len(probes))]
    coeffs = {}
    for i, (alpha, x) in enumerate(sorted(probes.items())):
        if check_orders:
            got = order_map(f, x, N=min(N, 10**4), seed=seeds[2 * i])
            if got != tuple(alpha):
                raise ValueError(f"probe {x} has order {got}, expected {tuple(alpha)}")
        coeffs[tuple(alpha)] = ronkin_coefficient(f, alpha, x, N, seeds[2 * i + 1])
    trop = TropicalPolynomial({a: c for a, (c, _) in coeffs.items()})
    return SpineResult(coeffs, trop, dict(probes))


def pr_function(spine_result: SpineResult, tau: RegularSubdivision, assignment: Mapping, s: Sequence) -> dict:
    """Generalized Passare-Rullgard lifting.

    ``-c_a`` on the orders of the spine; ``<a, a_v> + b_v + s_j`` on the other
    support points, taken in sorted order, with ``(a_v, b_v)`` the functional
    of the assigned cell.
    """
    others = sorted(assignment)
    if len(s) != len(others):
        raise ValueError(f"need {len(others)} entries of s, got {len(s)}")
    out = {a: -c for a, (c, _) in spine_result.coefficients.items()}
    for a, sj in zip(others, s):
        cell = _find_cell(tau, assignment[a])
        if not cell.contains(a):
            raise ValueError(f"{a} is not in its assigned cell")
        av, bv = tau.functional(cell)
        out[a] = sum(x * y for x, y in zip(a, av)) + bv + sj
    return out


def _find_cell(tau: RegularSubdivision, cell) -> Polytope:
    """Resolve a cell given by index, Polytope or point set."""
    if isinstance(cell, int):
        return tau.cells[cell]
    poly = cell if isinstance(cell, Polytope) else Polytope.from_points(cell)
    for c in tau.cells:
        if c.vertices == poly.vertices:
            return c
    raise ValueError(f"{sorted(poly.vertices)} is not a cell of the subdivision")


def torus_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(np.mod(a - b + math.pi, TWO_PI) - math.pi)
    return d


def phase_distance(p: np.ndarray, q: np.ndarray, n: int) -> np.ndarray:
    """Euclidean distance in ``R^n x (S^1)^n`` with the flat metric on the torus."""
    dl = p[..., :n] - q[..., :n]
    da = torus_distance(p[..., n:], q[..., n:])
    return np.sqrt(np.sum(dl * dl, axis=-1) + np.sum(da * da, axis=-1))


def _nearest_phase(sample: np.ndarray, ref: np.ndarray, n: int) -> np.ndarray:
    """Nearest-neighbour phase distance via a periodic KD-tree."""
    span = max(1.0, float(np.max(np.abs(np.concatenate([sample[:, :n], ref[:, :n]])))) + 1.0)
    boxsize = np.concatenate([np.full(n, 4 * span), np.full(n, TWO_PI)])
    shift = np.concatenate([np.full(n, 2 * span), np.zeros(n)])
    r = np.mod(ref + shift, boxsize)
    q = np.mod(sample + shift, boxsize)
    tree = cKDTree(r, boxsize=boxsize)
    d, _ = tree.query(q)
    return d


@dataclass
class LocalizationReport:
    ladder: list
    max_distance: list
    mean_distance: list
    stderr: list
    counts: list
    epsilon: float
    center: tuple
    passed: bool
    monotone: bool

    def as_dict(self) -> dict:
        return {
            "ladder": self.ladder, "max_distance": self.max_distance, "mean_distance": self.mean_distance,
            "stderr": self.stderr, "counts": self.counts, "epsilon": self.epsilon,
            "center": list(self.center), "passed": self.passed, "monotone": self.monotone,
        }


def _same_slice_distance(g: ComplexPolynomial, pts: np.ndarray, t: float, n: int) -> np.ndarray:
    """Distance from phase points to ``V(g)`` along coordinate slices through them."""
    logt = math.log(t)
    z = np.exp(pts[:, :n] * logt + 1j * pts[:, n:])
    best = np.full(len(pts), np.inf)
    for j in range(n):
        if not g.depends_on(j):
            continue
        r = _slice_roots(g, j, z)
        for c in range(r.shape[1]):
            w = r[:, c]
            ok = np.isfinite(w) & (w != 0)
            q = pts.copy()
            q[ok, j] = np.log(np.abs(w[ok])) / logt
            q[ok, n + j] = np.mod(np.angle(w[ok]), TWO_PI)
            d = np.where(ok, phase_distance(pts, q, n), np.inf)
            best = np.minimum(best, d)
    return best


def localization_check(family: ViroFamily, cell, r: float = 0.5, ladder: Sequence = (10.0, 1e2, 1e3, 1e6),
                       eps: float = 0.1, samples: int = 2000, seed=0, center=None,
                       reference_factor: int = 4, n_boot: int = 200) -> LocalizationReport:
    """Distance from ``V(f_t)`` over ``Log_t^{-1}(B_r(v))`` to ``V(f_t^{cell})``.

    Distances are measured in phase coordinates ``(Log_t, arg)``; the rescaling
    ``Phi`` is a translation in these coordinates and does not change them.
    ``v`` is the vertex dual to ``cell`` (or ``center``). For each sample the
    distance to the truncated hypersurface is bounded by the nearer of its
    same-slice solutions and the nearest point of a sampled truncated cloud.
    """
    tau = family.subdivision()
    full = _find_cell(tau, cell)
    v = tuple(float(a) for a in tau.functional(full)[0]) if center is None else tuple(float(c) for c in center)
    trunc = family.truncate(full)
    n = family.ambient_dim
    vv = np.array(v)
    box = np.stack([vv - r, vv + r], axis=1)
    root = _seed_sequence(seed)
    rng_boot = np.random.default_rng(_child(root, 0))
    maxes, means, errs, counts = [], [], [], []
    for i, t in enumerate(ladder):
        _check_t(t)
        s_full, s_trunc = _child(root, 1, i), _child(root, 2, i)
        cloud = sample_hypersurface(family, t, box, samples * 2, s_full).points
        inside = np.linalg.norm(cloud[:, :n] - vv, axis=1) <= r
        cloud = cloud[inside][:samples]
        if len(cloud) == 0:
            raise ValueError("empty sample set")
        g = trunc.evaluate_at(t)
        d = _same_slice_distance(g, cloud, t, n)
        try:
            ref = sample_hypersurface(g, t, box + np.array([-r, r]), reference_factor * samples, s_trunc).points
            d = np.minimum(d, _nearest_phase(cloud, ref, n))
        except ValueError:
            pass
        if not np.all(np.isfinite(d)):
            d = np.where(np.isfinite(d), d, np.nanmax(np.where(np.isfinite(d), d, np.nan)))
        boots = [d[rng_boot.integers(0, len(d), len(d))].max() for _ in range(n_boot)]
        maxes.append(float(d.max()))
        means.append(float(d.mean()))
        errs.append(float(np.std(boots, ddof=1)))
        counts.append(int(len(d)))
    monotone = all(b <= a + 2 * (ea + eb) for a, b, ea, eb in zip(maxes, maxes[1:], errs, errs[1:]))
    return LocalizationReport(list(map(float, ladder)), maxes, means, errs, counts, eps, v,
                              maxes[-1] <= eps, monotone)


def line_coamoeba_complement(theta, alpha: Sequence[float]) -> np.ndarray:
    """Mask of argument pairs in the open complement of the coamoeba of
    ``e^{i a1} z + e^{i a2} w + e^{i a3}``.

    ``(theta1, theta2)`` is outside the closed coamoeba exactly when the three
    term phases lie in an open half-plane, i.e. their largest circular gap
    exceeds pi.
    """
    th = np.atleast_2d(np.asarray(theta, dtype=float))
    ph = np.stack([th[:, 0] + alpha[0], th[:, 1] + alpha[1], np.full(len(th), float(alpha[2]))], axis=1)
    ph = np.sort(np.mod(ph, TWO_PI), axis=1)
    gaps = np.concatenate([np.diff(ph, axis=1), (ph[:, :1] + TWO_PI - ph[:, -1:])], axis=1)
    return gaps.max(axis=1) > math.pi


def line_polynomial(alpha: Sequence[float], radii: Sequence[float] = (1.0, 1.0, 1.0)) -> ComplexPolynomial:
    """``r1 e^{i a1} z + r2 e^{i a2} w + r3 e^{i a3}``."""
    return ComplexPolynomial({
        (1, 0): radii[0] * cmath.exp(1j * alpha[0]),
        (0, 1): radii[1] * cmath.exp(1j * alpha[1]),
        (0, 0): radii[2] * cmath.exp(1j * alpha[2]),
    })
