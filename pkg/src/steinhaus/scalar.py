"""Exact/float scalar helpers.

Exact values are :class:`fractions.Fraction`; float mode uses plain ``float``
with a fixed absolute tolerance.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

Scalar = Union[Fraction, float]

FLOAT_TOL = 1e-9


def exact(x) -> Fraction:
    """Coerce ints, Fractions, ``"p/q"`` strings and finite floats to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x)
    # numpy integer scalars
    return Fraction(int(x))


def scalar(x, mode: str = "exact") -> Scalar:
    if mode == "exact":
        return exact(x)
    return float(exact(x)) if isinstance(x, str) else float(x)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def sqrt(q) -> Scalar:
    """Square root that stays exact when ``q`` is the square of a rational."""
    if isinstance(q, (int, Fraction)):
        q = Fraction(q)
        if q < 0:
            raise ValueError("negative square")
        n, d = q.numerator, q.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Fraction(rn, rd)
        return math.sqrt(n / d) if n < 2**1000 else math.sqrt(float(q))
    return math.sqrt(q)


def ceil_log2(x) -> int:
    """Smallest integer n with 2**n >= x (x > 0), exact for rationals."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if x <= 0:
            raise ValueError("ceil_log2 needs x > 0")
        n = x.numerator.bit_length() - x.denominator.bit_length() - 1
        while Fraction(2) ** n < x:
            n += 1
        while Fraction(2) ** (n - 1) >= x:
            n -= 1
        return n
    if x <= 0:
        raise ValueError("ceil_log2 needs x > 0")
    n = math.ceil(math.log2(x))
    # guard against log2 rounding at exact powers of two
    if 2.0 ** (n - 1) >= x:
        n -= 1
    elif 2.0**n < x:
        n += 1
    return n


def fmt(x) -> str | float:
    """JSON/CSV encoding: exact values as ``"p/q"`` strings, floats as numbers."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return float(x)


def approx_eq(a, b, tol: float = FLOAT_TOL) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(float(a) - float(b)) <= tol
