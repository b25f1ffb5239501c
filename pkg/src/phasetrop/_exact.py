"""Small exact linear algebra over the rationals.

Matrices are lists of rows; entries are ``int`` or ``Fraction``. Sizes in this
package are tiny (dimension <= 5), so plain Gaussian elimination is adequate.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence

Vector = tuple


def frac(x) -> Fraction:
    """Convert ints, Fractions, decimal strings and floats to ``Fraction``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[frac(v) for v in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : rows @ x = 0}``."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Unique solution of a square system, or None when singular."""
    n = len(a)
    aug = [list(map(frac, row)) + [frac(bi)] for row, bi in zip(a, b)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [red[i][n] for i in range(n)]


def det(m: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-free elimination on a copy."""
    a = [[frac(v) for v in r] for r in m]
    n = len(a)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        result *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return sign * result


def primitive(v: Iterable) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    fv = [frac(x) for x in v]
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in fv), 1)
    ints = [int(x * den) for x in fv]
    g = reduce(gcd, (abs(i) for i in ints), 0)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(i // g for i in ints)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def lattice_length(u: Sequence, v: Sequence) -> int:
    """Number of lattice segments on the segment [u, v] between lattice points."""
    return reduce(gcd, (abs(int(a - b)) for a, b in zip(u, v)), 0)


def project_onto_span(v: Sequence, basis: Sequence[Sequence]) -> list[Fraction]:
    """Orthogonal projection of ``v`` onto the span of ``basis`` (exact)."""
    if not basis:
        return [Fraction(0)] * len(v)
    k = len(basis)
    gram = [[frac(dot(basis[i], basis[j])) for j in range(k)] for i in range(k)]
    rhs = [frac(dot(b, v)) for b in basis]
    coef = solve(gram, rhs)
    if coef is None:
        raise ValueError("basis is linearly dependent")
    n = len(v)
    return [sum(coef[i] * frac(basis[i][j]) for i in range(k)) for j in range(n)]
