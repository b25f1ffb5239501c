"""Truncated Puiseux series with rational exponents and complex coefficients.

A series is a finite sum ``sum_j xi_j t^j`` known modulo ``O(t^order)``;
``order=None`` marks an exact (finite) series. The valuation is
``val(a) = -min exponent``, so large negative exponents are large elements.
Exponents are exact ``Fraction``; coefficients are complex floats.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .tropical import TropicalPolynomial

ZERO_TOL = 1e-13
DEFAULT_PRECISION = Fraction(3)


def _min_order(*orders):
    known = [o for o in orders if o is not None]
    return min(known) if known else None


@dataclass(frozen=True)
class PuiseuxSeries:
    terms: tuple = ()
    order: Fraction | None = None

    def __post_init__(self):
        exps = [e for e, _ in self.terms]
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise ValueError("exponents must be strictly increasing")
        if any(c == 0 for _, c in self.terms):
            raise ValueError("coefficients must be nonzero")
        if self.order is not None and exps and exps[-1] >= self.order:
            raise ValueError("term at or beyond the truncation order")

    @classmethod
    def from_terms(cls, terms: Mapping | Iterable, order=None) -> "PuiseuxSeries":
        """Collect terms, merging equal exponents and dropping cancelled ones."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Fraction, complex] = {}
        scale: dict[Fraction, float] = {}
        for e, c in items:
            e = Fraction(e)
            c = complex(c)
            acc[e] = acc.get(e, 0j) + c
            scale[e] = max(scale.get(e, 0.0), abs(c))
        order = None if order is None else Fraction(order)
        out = []
        for e in sorted(acc):
            if order is not None and e >= order:
                continue
            c = acc[e]
            if c == 0 or abs(c) <= ZERO_TOL * scale[e]:
                continue
            out.append((e, c))
        return cls(tuple(out), order)

    @classmethod
    def monomial(cls, coeff, exponent=0) -> "PuiseuxSeries":
        return cls.from_terms([(exponent, coeff)])

    @classmethod
    def constant(cls, c) -> "PuiseuxSeries":
        return cls.from_terms([(0, c)])

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def leading(self) -> tuple[Fraction, complex]:
        if not self.terms:
            raise ValueError("zero series has no leading term")
        return self.terms[0]

    def trimmed(self, order) -> "PuiseuxSeries":
        order = Fraction(order)
        new = order if self.order is None else min(order, self.order)
        return PuiseuxSeries(tuple((e, c) for e, c in self.terms if e < new), new)

    def __add__(self, other):
        other = _coerce(other)
        return PuiseuxSeries.from_terms(self.terms + other.terms, _min_order(self.order, other.order))

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries(tuple((e, -c) for e, c in self.terms), self.order)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        # a = A + O(t^oa), b = B + O(t^ob)  =>  ab = AB + O(t^min(oa + ord B, ob + ord A))
        cand = []
        if self.order is not None:
            cand.append(self.order + (other.leading[0] if other.terms else other.order or 0))
        if other.order is not None:
            cand.append(other.order + (self.leading[0] if self.terms else self.order or 0))
        order = min(cand) if cand else None
        return _product(self.terms, other.terms, order)

    __rmul__ = __mul__

    def mul(self, other, cap) -> "PuiseuxSeries":
        """``(self * other).trimmed(cap)`` without forming the discarded products."""
        other = _coerce(other)
        cand = [Fraction(cap)]
        if self.order is not None:
            cand.append(self.order + (other.leading[0] if other.terms else other.order or 0))
        if other.order is not None:
            cand.append(other.order + (self.leading[0] if self.terms else self.order or 0))
        return _product(self.terms, other.terms, min(cand))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = PuiseuxSeries.constant(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self, upto=None) -> "PuiseuxSeries":
        """``1/self`` with every term of exponent below ``upto`` correct.

        For exact input and ``upto=None`` the relative precision
        ``DEFAULT_PRECISION`` is used unless the series is a monomial.
        """
        if not self.terms:
            raise ZeroDivisionError("inverse of the zero series")
        e0, c0 = self.terms[0]
        lead_inv = PuiseuxSeries.monomial(1 / c0, -e0)
        if len(self.terms) == 1 and self.order is None:
            return lead_inv
        limits = []
        if upto is not None:
            limits.append(Fraction(upto))
        if self.order is not None:
            limits.append(-e0 + (self.order - e0))
        target = min(limits) if limits else -e0 + DEFAULT_PRECISION
        rel = target + e0  # required precision of the unit part
        # self = c0 t^e0 (1 + u), ord(u) > 0
        u = PuiseuxSeries.from_terms([(e - e0, c / c0) for e, c in self.terms[1:]],
                                     None if self.order is None else self.order - e0)
        rel_order = rel if u.order is None else min(rel, u.order)
        acc = PuiseuxSeries.constant(1).trimmed(rel_order)
        if u.terms:
            k_max = math.ceil(rel_order / u.leading[0]) if rel_order > 0 else 0
            power = PuiseuxSeries.constant(1)
            neg_u = (-u).trimmed(rel_order)
            for _ in range(k_max):
                power = power.mul(neg_u, rel_order)
                if not power.terms:
                    break
                acc = acc + power
        acc = acc.trimmed(rel_order)
        return lead_inv * acc

    def __truediv__(self, other):
        other = _coerce(other)
        if not self.terms:
            return PuiseuxSeries((), None if self.order is None else self.order - other.leading[0])
        return self * other.inverse()

    def __repr__(self):
        return f"PuiseuxSeries({format_series(self)})"


def _product(a: tuple, b: tuple, order) -> PuiseuxSeries:
    """Cauchy product of term tuples, keeping exponents below ``order``, on an integer exponent grid."""
    if not a or not b:
        return PuiseuxSeries((), order)
    den = math.lcm(*(e.denominator for e, _ in a), *(e.denominator for e, _ in b),
                   1 if order is None else order.denominator)
    ia = [(int(e * den), c) for e, c in a]
    ib = [(int(e * den), c) for e, c in b]
    top = None if order is None else int(order * den)
    acc: dict[int, complex] = {}
    scale: dict[int, float] = {}
    for e1, c1 in ia:
        if top is not None and e1 + ib[0][0] >= top:
            break
        for e2, c2 in ib:
            e = e1 + e2
            if top is not None and e >= top:
                break
            c = c1 * c2
            acc[e] = acc.get(e, 0j) + c
            scale[e] = max(scale.get(e, 0.0), abs(c))
    out = tuple((Fraction(e, den), acc[e]) for e in sorted(acc)
                if acc[e] != 0 and abs(acc[e]) > ZERO_TOL * scale[e])
    return PuiseuxSeries(out, order)


def _coerce(x) -> PuiseuxSeries:
    if isinstance(x, PuiseuxSeries):
        return x
    if x == 0:
        return PuiseuxSeries()
    return PuiseuxSeries.constant(x)


def format_series(a: PuiseuxSeries) -> str:
    parts = []
    for e, c in a.terms:
        parts.append(f"({c.real!r},{c.imag!r})t^{{{e}}}")
    s = " + ".join(parts) if parts else "0"
    if a.order is not None:
        s += f" + O(t^{{{a.order}}})"
    return s


def val(a: PuiseuxSeries) -> Fraction | float:
    """``-min exponent``; ``-inf`` for the zero series."""
    if a.is_zero:
        return -math.inf
    return -a.leading[0]


def w(a: PuiseuxSeries) -> complex:
    """Complexified valuation ``exp(val(a) + i arg(leading coefficient))``."""
    if a.is_zero:
        raise ValueError("w undefined at 0")
    e, c = a.leading
    return cmath.exp(complex(float(-e), cmath.phase(c)))


def arg_w(a: PuiseuxSeries) -> float:
    """Phase of ``w(a)``; this is the argument map on the nonzero series."""
    if a.is_zero:
        raise ValueError("w undefined at 0")
    return cmath.phase(a.leading[1])


def W(point: Sequence[PuiseuxSeries]) -> tuple[complex, ...]:
    return tuple(w(a) for a in point)


@dataclass(frozen=True, eq=False)
class PuiseuxPolynomial:
    terms: Mapping

    def __post_init__(self):
        clean = {}
        for alpha, a in self.terms.items():
            a = _coerce(a)
            if a.is_zero:
                raise ValueError(f"zero coefficient at {alpha}")
            clean[tuple(int(x) for x in alpha)] = a
        if not clean:
            raise ValueError("polynomial has no terms")
        if len({len(k) for k in clean}) != 1:
            raise ValueError("exponents must share one ambient dimension")
        object.__setattr__(self, "terms", clean)

    @property
    def ambient_dim(self) -> int:
        return len(next(iter(self.terms)))

    def __call__(self, point: Sequence[PuiseuxSeries]) -> PuiseuxSeries:
        total = PuiseuxSeries()
        for alpha, a in self.terms.items():
            term = a
            for z, e in zip(point, alpha):
                if e:
                    term = term * (z ** e)
            total = total + term
        return total

    def univariate(self, point: Sequence[PuiseuxSeries], var: int = -1) -> list[PuiseuxSeries]:
        """Coefficients ``b_k`` of the polynomial in variable ``var`` after substitution.

        Exponents in ``var`` are shifted so the lowest is zero (a monomial factor
        does not change the zero set in the torus).
        """
        n = self.ambient_dim
        var %= n
        low = min(a[var] for a in self.terms)
        deg = max(a[var] for a in self.terms) - low
        coeffs = [PuiseuxSeries() for _ in range(deg + 1)]
        others = [i for i in range(n) if i != var]
        for alpha, a in self.terms.items():
            term = a
            for i, z in zip(others, point):
                if alpha[i]:
                    term = term * (z ** alpha[i])
            k = alpha[var] - low
            coeffs[k] = coeffs[k] + term
        return coeffs


def kapranov_tropicalize(g: PuiseuxPolynomial) -> TropicalPolynomial:
    """Tropical polynomial ``max_a { val(a_a) + <a, x> }``."""
    return TropicalPolynomial({alpha: val(a) for alpha, a in g.terms.items()})


@dataclass
class RootReport:
    roots: list = field(default_factory=list)
    issues: list = field(default_factory=list)


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, int]]:
    """Edges (i, j) of the lower convex hull of points sorted by abscissa."""
    hull: list[tuple[int, Fraction]] = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return [(hull[i][0], hull[i + 1][0]) for i in range(len(hull) - 1)]


def _horner(coeffs: Sequence[PuiseuxSeries], y: PuiseuxSeries, cap) -> PuiseuxSeries:
    """``sum_k coeffs[k] y^k`` correct below exponent ``cap``."""
    # truncation error in the accumulator is multiplied by powers of y
    margin = (len(coeffs) - 1) * max(Fraction(0), -y.leading[0])
    acc = PuiseuxSeries()
    for b in reversed(coeffs):
        acc = (acc.mul(y, cap + margin) + b).trimmed(cap + margin)
    return acc.trimmed(cap)


def newton_puiseux_roots(coeffs: Sequence[PuiseuxSeries], precision=DEFAULT_PRECISION,
                         separation: float = 1e-6, max_steps: int = 40) -> RootReport:
    """Nonzero roots of ``sum_k b_k y^k`` as truncated Puiseux series.

    Leading terms come from the lower Newton polygon of ``(k, ord b_k)``;
    each is refined by Puiseux Newton iteration until ``precision`` orders
    past the leading exponent are determined. Edges whose leading-coefficient
    equation has clustered roots are reported as non-generic.
    """
    precision = Fraction(precision)
    pts = [(k, b.leading[0]) for k, b in enumerate(coeffs) if not b.is_zero]
    report = RootReport()
    if len(pts) < 2:
        report.issues.append("no roots in the torus")
        return report
    deriv = [b * k for k, b in enumerate(coeffs)][1:]
    ords = dict(pts)
    for i, j in _lower_hull(pts):
        oi, oj = ords[i], ords[j]
        slope = (oj - oi) / (j - i)
        mu = -slope
        on_edge = [k for k, o in pts if i <= k <= j and o == oi + slope * (k - i)]
        # sum_{k on edge} lc(b_k) c^(k-i) = 0
        lead = np.zeros(j - i + 1, dtype=complex)
        for k in on_edge:
            lead[j - k] = coeffs[k].leading[1]
        cs = np.roots(lead)
        scale = max(abs(c) for c in cs)
        gaps = [abs(a - b) for x, a in enumerate(cs) for b in cs[x + 1:]]
        if gaps and min(gaps) <= separation * scale:
            report.issues.append(f"non-generic; refine manually (slope {slope})")
            continue
        for c in cs:
            # for a simple root ord P'(y) = ord(b_i) + (i - 1) mu, the common edge value less mu
            report.roots.append(_refine(coeffs, deriv, complex(c), mu, precision, max_steps, oi + (i - 1) * mu))
    return report


def _refine(coeffs, deriv, c, mu, precision, max_steps, dp_order) -> PuiseuxSeries:
    cap = mu + precision
    # the Newton step p/p' is needed below cap and has order > mu, so p' needs precision relative orders
    wide = dp_order + precision
    y = PuiseuxSeries.monomial(c, mu)
    for _ in range(max_steps):
        dp = _horner(deriv, y, wide)
        if dp.is_zero:
            break
        p = _horner(coeffs, y, dp.leading[0] + cap)
        if p.is_zero:
            break
        step = p.mul(dp.inverse(upto=cap - p.leading[0]), cap)
        if step.is_zero:
            break
        y = PuiseuxSeries((y - step).trimmed(cap).terms, None)
    order = cap
    inexact = [(k, b) for k, b in enumerate(coeffs) if b.order is not None]
    if inexact:
        # a perturbation O(t^o) of b_k moves a simple root by O(t^(o + k mu - ord P'))
        dp = _horner(deriv, y, wide)
        if not dp.is_zero:
            order = min(order, min(b.order + k * mu for k, b in inexact) - dp.leading[0])
    return PuiseuxSeries(tuple((e, v) for e, v in y.terms if e < order), order)


@dataclass
class PuiseuxSamples:
    points: list = field(default_factory=list)
    failures: list = field(default_factory=list)


def random_series(rng: np.random.Generator, max_den: int = 4, span: int = 3, nterms: int = 2) -> PuiseuxSeries:
    """Exact random series with rational exponents of denominator <= ``max_den``."""
    k = int(rng.integers(1, nterms + 1))
    exps = set()
    while len(exps) < k:
        den = int(rng.integers(1, max_den + 1))
        exps.add(Fraction(int(rng.integers(-span * den, span * den + 1)), den))
    terms = []
    for e in sorted(exps):
        mod = math.exp(rng.normal(0.0, 0.5))
        terms.append((e, cmath.rect(mod, rng.uniform(0, 2 * math.pi))))
    return PuiseuxSeries.from_terms(terms)


def sample_puiseux_solutions(g: PuiseuxPolynomial, k: int, seed, precision=DEFAULT_PRECISION,
                             max_den: int = 4, max_tries: int | None = None,
                             fixed: Sequence[PuiseuxSeries] | None = None) -> PuiseuxSamples:
    """Points of ``V(g)`` over the Puiseux field, solved in the last variable.

    The first ``n - 1`` coordinates are random exact series (or ``fixed``); the
    last is each nonzero Newton-Puiseux root. Failures are recorded per draw.
    """
    n = g.ambient_dim
    if all(a[-1] == min(b[-1] for b in g.terms) for a in g.terms):
        raise ValueError("polynomial does not depend on its last variable")
    rng = np.random.default_rng(seed)
    out = PuiseuxSamples()
    tries = 0
    max_tries = max_tries or 20 * max(k, 1)
    while len(out.points) < k and tries < max_tries:
        tries += 1
        if fixed is not None:
            free = list(fixed)
        else:
            free = [random_series(rng, max_den) for _ in range(n - 1)]
        rep = newton_puiseux_roots(g.univariate(free), precision)
        for issue in rep.issues:
            out.failures.append(f"draw {tries}: {issue}")
        for y in rep.roots:
            if len(out.points) < k:
                out.points.append(tuple(free) + (y,))
        if fixed is not None or n == 1:
            break
    return out


def random_polynomial(rng: np.random.Generator, n: int, max_terms: int = 5, max_den: int = 4,
                      max_exp: int = 2) -> PuiseuxPolynomial:
    """Random polynomial with random-series coefficients that depends on its last variable.

    For ``n = 1`` the support always spans degree ``max_exp`` so that it has
    ``max_exp`` nonzero roots.
    """
    while True:
        if n == 1:
            inner = [(int(e),) for e in rng.choice(np.arange(1, max_exp), size=int(rng.integers(0, max_terms - 1)),
                                                    replace=False)]
            support = [(0,), (max_exp,)] + inner
        else:
            grid = [tuple(int(v) for v in a) for a in np.ndindex(*(max_exp + 1,) * n)]
            m = int(rng.integers(2, max_terms + 1))
            support = [grid[i] for i in rng.choice(len(grid), size=m, replace=False)]
        if len({a[-1] for a in support}) > 1:
            return PuiseuxPolynomial({a: random_series(rng, max_den) for a in support})
