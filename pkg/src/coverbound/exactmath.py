"""Exact integer and rational helpers shared by every bound computation.

Integers are plain Python ``int`` (unbounded) and rationals are
:class:`fractions.Fraction`, which is always kept in lowest terms with a
positive denominator.  Nothing in here touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, isqrt

DEFAULT_SQRT_SCALE = 10 ** 40

Rat = Fraction


def binom(n: int, r: int) -> int:
    """Binomial coefficient C(n, r); zero when ``r > n`` or ``r < 0``."""
    if r < 0 or n < 0 or r > n:
        return 0
    return comb(n, r)


def ceil_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by zero")
    return -((-a) // b)


def ceil_rat(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def alt_binom_sum(i: int, ell: int) -> int:
    """Return sum_{j=i}^{ell} (-1)^(i+j) C(ell, j) C(j, i).

    Equals 1 when ``i == ell`` and 0 otherwise.
    """
    if i < 0 or i > ell:
        raise ValueError("invalid range")
    total = 0
    for j in range(i, ell + 1):
        sign = -1 if (i + j) % 2 else 1
        total += sign * comb(ell, j) * comb(j, i)
    return total


def sqrt_lower(x: Fraction | int, scale: int = DEFAULT_SQRT_SCALE) -> Fraction:
    """Certified under-approximation of sqrt(x) on the grid 1/scale.

    Returns ``floor(sqrt(x) * scale) / scale``, so the result ``r`` satisfies
    ``r <= sqrt(x) < r + 1/scale``.
    """
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative radicand")
    if scale < 1:
        raise ValueError("scale must be >= 1")
    # floor(sqrt(p/q) * s) == isqrt(floor(p * s^2 / q))
    scaled = (x.numerator * scale * scale) // x.denominator
    return Fraction(isqrt(scaled), scale)
