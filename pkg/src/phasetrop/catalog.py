"""Worked examples: the hyperbola and parabola families, the phased line, smooth curves."""
from __future__ import annotations

import math
from fractions import Fraction

from .amoeba import ComplexPolynomial, ViroFamily, line_polynomial
from .puiseux import PuiseuxPolynomial, PuiseuxSeries
from .tropical import TropicalPolynomial, smooth_plane_curve, standard_hyperplane

SQUARE = ((0, 0), (1, 0), (0, 1), (1, 1))
LOWER_TRIANGLE = ((0, 0), (1, 0), (0, 1))
UPPER_TRIANGLE = ((1, 0), (0, 1), (1, 1))
LINE_PHASES = (2.0, 0.5, 1.0)


def hyperbola_tropical(c00) -> TropicalPolynomial:
    """``max{c00, x, y, x+y}``; ``c00 = -1, +1, 0`` are the three cases with the square dual."""
    return TropicalPolynomial({(0, 0): Fraction(c00), (1, 0): 0, (0, 1): 0, (1, 1): 0})


def hyperbola(lam: complex) -> ComplexPolynomial:
    """``lam + z + w + zw``."""
    return ComplexPolynomial({(0, 0): lam, (1, 0): 1, (0, 1): 1, (1, 1): 1})


def hyperbola_family() -> ViroFamily:
    """``t^{-1} + z + w + zw``; its Log_t limit is ``max{x, y, x+y, -1}``."""
    return ViroFamily({a: 1 for a in SQUARE}, {(0, 0): -1, (1, 0): 0, (0, 1): 0, (1, 1): 0})


def hyperbola_puiseux(exponent=-1) -> PuiseuxPolynomial:
    """``t^{exponent} + z + w + zw`` over the Puiseux field."""
    one = PuiseuxSeries.constant(1)
    return PuiseuxPolynomial({(0, 0): PuiseuxSeries.monomial(1, exponent), (1, 0): one, (0, 1): one, (1, 1): one})


def parabola(lam: float = 2.0) -> ComplexPolynomial:
    """``w - z^2 + 2z - lam``."""
    return ComplexPolynomial({(0, 1): 1, (2, 0): -1, (1, 0): 2, (0, 0): -lam})


def parabola_puiseux(lam: float = 2.0) -> PuiseuxPolynomial:
    """``t^0 w - t^0 z^2 + 2 t^0 z - t^{-log lam}``, exponent snapped to a rational."""
    e = Fraction(-math.log(lam)).limit_denominator(10**6)
    return PuiseuxPolynomial({
        (0, 1): PuiseuxSeries.constant(1),
        (2, 0): PuiseuxSeries.constant(-1),
        (1, 0): PuiseuxSeries.constant(2),
        (0, 0): PuiseuxSeries.monomial(-1, e),
    })


def phased_line(alpha=LINE_PHASES, radii=(1.0, 1.0, 1.0)) -> ComplexPolynomial:
    return line_polynomial(alpha, radii)


def complex_line(n: int = 2) -> ComplexPolynomial:
    """``1 + z_1 + ... + z_n``."""
    terms = {tuple(0 for _ in range(n)): 1}
    for i in range(n):
        terms[tuple(int(j == i) for j in range(n))] = 1
    return ComplexPolynomial(terms)


__all__ = [
    "SQUARE", "LOWER_TRIANGLE", "UPPER_TRIANGLE", "LINE_PHASES",
    "hyperbola_tropical", "hyperbola", "hyperbola_family", "hyperbola_puiseux",
    "parabola", "parabola_puiseux", "phased_line", "complex_line",
    "smooth_plane_curve", "standard_hyperplane",
]
