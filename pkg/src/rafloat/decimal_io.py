"""Decimal reading and shortest round-trip printing of binary64 values."""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction

from .binary64 import BINARY64, Binary64Value, ValueClass, fpp
from .errors import RangeFault
from .rounding import fp_round, to_fp

_DECIMAL = re.compile(r"\A(-?)(\d+)(?:\.(\d+))?(?:[eE](-?\d+))?\Z")

MAX_DIGITS = 17


class DecimalSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class DecimalLiteral:
    text: str
    value: Fraction

    @classmethod
    def parse(cls, text: str) -> "DecimalLiteral":
        return cls(text, decimal_value(text))


@functools.lru_cache(maxsize=1024)
def _pow10(k: int) -> int:
    return 10**k


def is_decimal_literal(text: str) -> bool:
    return _DECIMAL.match(text) is not None


def decimal_value(text: str) -> Fraction:
    """Exact rational value of a decimal literal ``[-]digits[.digits][e[-]digits]``."""
    m = _DECIMAL.match(text)
    if m is None:
        raise DecimalSyntaxError(f"malformed decimal literal: {text!r}")
    sign, whole, frac, exp = m.groups()
    frac = frac or ""
    digits = int(whole + frac)
    e = (int(exp) if exp else 0) - len(frac)
    value = Fraction(digits * _pow10(e)) if e >= 0 else Fraction(digits, _pow10(-e))
    return -value if sign else value


def parse_decimal(text: str, ledger=None) -> Fraction:
    """Correctly rounded binary64 value of a decimal literal.

    Raises DecimalSyntaxError on malformed text and RangeFault on overflow.
    """
    return to_fp(decimal_value(text), ledger=ledger)


def _decimal_exponent(a: Fraction) -> int:
    """floor(log10(a)) for a > 0."""
    n, d = a.numerator, a.denominator
    k = ((n.bit_length() - d.bit_length()) * 30103) // 100000
    while True:
        if k >= 0:
            below = n < d * _pow10(k)
        else:
            below = n * _pow10(-k) < d
        if below:
            k -= 1
            continue
        if k + 1 >= 0:
            above = n >= d * _pow10(k + 1)
        else:
            above = n * _pow10(-k - 1) >= d
        if above:
            k += 1
            continue
        return k


def _round_trips(c: int, e: int, target: Fraction) -> bool:
    value = Fraction(c * _pow10(e)) if e >= 0 else Fraction(c, _pow10(-e))
    try:
        return fp_round(value).result == target
    except RangeFault:
        return False


def shortest_digits(x: Fraction) -> tuple[int, int]:
    """``(c, e)`` with ``c * 10**e`` the shortest decimal reading back as ``|x|``.

    For each digit count from 1 upward, the decimals just below and just
    above ``|x|`` are tried; among those that read back correctly the closer
    wins, then the one with the even last digit.
    """
    a = abs(Fraction(x))
    if a == 0:
        return 0, 0
    n, d = a.numerator, a.denominator
    k = _decimal_exponent(a)
    for digits in range(1, MAX_DIGITS + 1):
        e = k - digits + 1
        if e >= 0:
            num, den = n, d * _pow10(e)
        else:
            num, den = n * _pow10(-e), d
        lo, rem = divmod(num, den)
        candidates = [lo] if rem == 0 else [lo, lo + 1]
        best = None
        for c in candidates:
            if not _round_trips(c, e, a):
                continue
            key = (abs(c * den - num), c & 1)
            if best is None or key < best[0]:
                best = (key, c)
        if best is not None:
            c = best[1]
            while c and c % 10 == 0:
                c //= 10
                e += 1
            return c, e
    raise AssertionError(f"no decimal of at most {MAX_DIGITS} digits reads back as {x}")


def format_decimal(negative: bool, c: int, e: int) -> str:
    """Positional notation for magnitudes in [1e-3, 1e16), scientific otherwise."""
    if c == 0:
        return "-0.0" if negative else "0.0"
    s = str(c)
    lead = len(s) - 1 + e
    sign = "-" if negative else ""
    if -3 <= lead < 16:
        if e >= 0:
            body = s + "0" * e + ".0"
        else:
            point = len(s) + e
            if point > 0:
                body = s[:point] + "." + s[point:]
            else:
                body = "0." + "0" * -point + s
    else:
        body = s[0] + ("." + s[1:] if len(s) > 1 else "") + f"e{lead}"
    return sign + body


def shortest_decimal(x: Fraction) -> str:
    """Shortest decimal string that :func:`parse_decimal` maps back to ``x``."""
    x = Fraction(x)
    if not fpp(x, BINARY64):
        raise ValueError(f"{x} is not a binary64 value")
    c, e = shortest_digits(x)
    return format_decimal(x < 0, c, e)


def format_value(v: Binary64Value) -> str:
    """Print a hardware datum, including the classes the model never produces."""
    if v.cls is ValueClass.NAN:
        return "nan"
    if v.cls is ValueClass.POS_INF:
        return "inf"
    if v.cls is ValueClass.NEG_INF:
        return "-inf"
    if v.negative_zero:
        return "-0.0"
    return shortest_decimal(v.value)
