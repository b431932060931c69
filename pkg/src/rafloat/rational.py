"""Exact rational arithmetic.

Every logical value is a :class:`fractions.Fraction`.  Fractions are kept in
lowest terms with a positive denominator on construction, so two equal
rationals are always structurally identical; that is what the ledger relies
on for deduplication.
"""

from __future__ import annotations

import enum
import re
from fractions import Fraction

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class Ordering(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def rat_make(n: int, d: int = 1) -> Fraction:
    """Build the canonical rational ``n/d``.

    Raises ZeroDivisionError when ``d`` is zero.
    """
    if not isinstance(n, int) or not isinstance(d, int):
        raise TypeError("rat_make takes integers")
    return Fraction(n, d)


def rat_add(a: Fraction, b: Fraction) -> Fraction:
    return a + b


def rat_sub(a: Fraction, b: Fraction) -> Fraction:
    return a - b


def rat_mul(a: Fraction, b: Fraction) -> Fraction:
    return a * b


def rat_div(a: Fraction, b: Fraction) -> Fraction:
    if b == 0:
        raise ZeroDivisionError("rational division by zero")
    return a / b


def rat_cmp(a: Fraction, b: Fraction) -> Ordering:
    # cross-multiplication; denominators are positive
    lhs = a.numerator * b.denominator
    rhs = b.numerator * a.denominator
    if lhs < rhs:
        return Ordering.LT
    if lhs > rhs:
        return Ordering.GT
    return Ordering.EQ


def rat_scale_pow2(a: Fraction, k: int) -> Fraction:
    """Return ``a * 2**k`` exactly."""
    if k >= 0:
        return Fraction(a.numerator << k, a.denominator)
    return Fraction(a.numerator, a.denominator << -k)


def is_canonical(a: Fraction) -> bool:
    from math import gcd

    n, d = a.numerator, a.denominator
    return d > 0 and gcd(n, d) == 1 and (n != 0 or d == 1)


_RATIONAL_TEXT = re.compile(r"\A([+-]?\d+)(?:/(\d+))?\Z")


def format_rational(a: Fraction) -> str:
    """Canonical text ``n/d``; the denominator is dropped when it is 1."""
    if a.denominator == 1:
        return str(a.numerator)
    return f"{a.numerator}/{a.denominator}"


def parse_rational(text: str) -> Fraction:
    m = _RATIONAL_TEXT.match(text.strip())
    if m is None:
        raise ValueError(f"not a rational: {text!r}")
    n = int(m.group(1))
    d = int(m.group(2)) if m.group(2) is not None else 1
    return rat_make(n, d)
