"""Exact rational helpers: parsing, rendering, square roots, determinants.

Every quantity the library reports is a :class:`fractions.Fraction`; floats
only appear as decimal renderings next to the exact value.
"""

from __future__ import annotations

import math
from fractions import Fraction

# Denominator scale used when a square root is irrational.  2**64 keeps sums
# of such numbers on a common power-of-two denominator.
SQRT_SCALE_BITS = 64


def to_fraction(value) -> Fraction:
    """Coerce ints, rational strings ("3/4"), decimal strings and floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        # Treat floats as the decimal literal they print as, not the binary
        # value, so JSON round-trips stay stable.
        return Fraction(repr(value))
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def rat_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def rat_json(q) -> dict:
    """Exact-plus-decimal rendering used in all JSON reports."""
    if q is None:
        return {"frac": None, "dec": None}
    if q == math.inf:
        return {"frac": "inf", "dec": None}
    q = Fraction(q)
    return {"frac": rat_str(q), "dec": float(q)}


def rational_sqrt(x: Fraction, bits: int = SQRT_SCALE_BITS) -> Fraction:
    """Deterministic rational square root.

    Exact when x is a perfect square of a rational; otherwise rounded to the
    nearest multiple of 2**-bits.
    """
    x = Fraction(x)
    if x < 0:
        raise ValueError("square root of a negative rational")
    if x == 0:
        return Fraction(0)
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    scale = 1 << bits
    m = (n * scale * scale) // d
    r = math.isqrt(m)
    if (r + 1) * (r + 1) - m <= m - r * r:
        r += 1
    return Fraction(r, scale)


def det(matrix) -> Fraction:
    """Determinant of a square matrix of Fractions (fraction-free not needed
    at these sizes; plain exact elimination)."""
    m = [list(map(Fraction, row)) for row in matrix]
    n = len(m)
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        pv = m[col][col]
        result *= pv
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] / pv
                row_r, row_c = m[r], m[col]
                for c in range(col, n):
                    row_r[c] -= factor * row_c[c]
    return sign * result


def cayley_menger_volume2(sq_dists) -> Fraction:
    """Squared k-volume of a simplex from pairwise squared distances.

    sq_dists is an (k+1)x(k+1) symmetric matrix of squared distances.  The
    result is rational and negative or zero exactly when the distances are
    not realizable by a nondegenerate Euclidean simplex.
    """
    m = len(sq_dists)
    k = m - 1
    cm = [[Fraction(0)] * (m + 1) for _ in range(m + 1)]
    for i in range(m):
        cm[0][i + 1] = Fraction(1)
        cm[i + 1][0] = Fraction(1)
        for j in range(m):
            cm[i + 1][j + 1] = Fraction(sq_dists[i][j])
    d = det(cm)
    denom = (2**k) * (math.factorial(k) ** 2)
    return Fraction((-1) ** (k + 1)) * d / denom
