"""Floating-point operations defined as the rounding of exact rational results.

Operands must satisfy ``fpp``; the guard is checked eagerly rather than
coercing through ``to_fp``.
"""

from __future__ import annotations

from fractions import Fraction

from .binary64 import BINARY64, FloatFormat, fpp
from .errors import FaultKind, GuardViolation, RangeFault
from .ledger import SQRT_KERNEL, resolve_ledger
from .rounding import Direction, RoundOutcome, fp_round


def _guard(name: str, fmt: FloatFormat, *operands) -> None:
    for x in operands:
        if not fpp(x, fmt):
            raise GuardViolation(name, x)


def fp_add(x: Fraction, y: Fraction, fmt: FloatFormat = BINARY64) -> Fraction:
    _guard("fp+", fmt, x, y)
    return fp_round(x + y, fmt).result


def fp_sub(x: Fraction, y: Fraction, fmt: FloatFormat = BINARY64) -> Fraction:
    _guard("fp-", fmt, x, y)
    return fp_round(x - y, fmt).result


def fp_mul(x: Fraction, y: Fraction, fmt: FloatFormat = BINARY64) -> Fraction:
    _guard("fp*", fmt, x, y)
    return fp_round(x * y, fmt).result


def fp_div(x: Fraction, y: Fraction, fmt: FloatFormat = BINARY64) -> Fraction:
    _guard("fp/", fmt, x, y)
    if y == 0:
        raise RangeFault(FaultKind.INVALID, x, f"INVALID: division of {x} by zero")
    return fp_round(Fraction(x) / y, fmt).result


def isqrt_newton(n: int) -> int:
    """Largest r with r*r <= n, by Newton iteration from above."""
    if n < 0:
        raise ValueError("isqrt of a negative integer")
    if n == 0:
        return 0
    x = 1 << ((n.bit_length() + 1) // 2)  # x >= sqrt(n)
    while True:
        y = (x + n // x) >> 1
        if y >= x:
            return x
        x = y


def sqrt_outcome(x: Fraction, fmt: FloatFormat = BINARY64) -> RoundOutcome:
    """Correctly rounded square root of a non-negative rational, with its direction.

    ``x * 4**s`` is truncated to an integer with at least 2p+5 bits so that
    its integer square root r carries two or more guard bits.  Every rounding
    boundary is then an integer multiple of the unit of r, and an inexact root
    lying strictly between r and r+1 rounds exactly as r + 1/2 does.
    """
    x = Fraction(x)
    if x < 0:
        raise RangeFault(FaultKind.INVALID, x, f"INVALID: square root of negative {x}")
    if x == 0:
        return RoundOutcome(x, False, Direction.EXACT)
    n, d = x.numerator, x.denominator
    s = -(-(2 * fmt.precision + 6 - (n.bit_length() - d.bit_length())) // 2)
    if s >= 0:
        big, rem = divmod(n << (2 * s), d)
    else:
        big, rem = divmod(n, d << (-2 * s))
    r = isqrt_newton(big)
    if rem == 0 and r * r == big:
        standin = Fraction(r, 1 << s) if s >= 0 else Fraction(r << -s)
    else:
        k = s + 1
        standin = Fraction(2 * r + 1, 1 << k) if k >= 0 else Fraction((2 * r + 1) << -k)
    return fp_round(standin, fmt)


def fp_sqrt(x: Fraction, fmt: FloatFormat = BINARY64, ledger=None) -> Fraction:
    _guard("fp-sqrt", fmt, x)
    result = sqrt_outcome(x, fmt).result
    target = resolve_ledger(ledger)
    if target is not None:
        target.record(SQRT_KERNEL, (x,), result)
    return result
