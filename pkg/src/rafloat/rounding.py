"""Round-to-nearest-even from arbitrary rationals to representable rationals.

:func:`fp_round` is the non-recording rounding kernel.  :func:`to_fp` is the
executable conversion; each call records a fact in the active ledger, if one
is set.
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
import functools
from dataclasses import dataclass
from fractions import Fraction

from .binary64 import BINARY64, FloatFormat, dyadic, enumerate_values
from .errors import FaultKind, RangeFault
from .ledger import TO_FP, resolve_ledger


class Direction(enum.Enum):
    """Where the result sits relative to the input value."""

    EXACT = "EXACT"
    DOWN = "DOWN"
    UP = "UP"
    TIE_TO_EVEN = "TIE_TO_EVEN"


@dataclass(frozen=True)
class RoundOutcome:
    result: Fraction
    inexact: bool
    direction: Direction


_flip_ties: contextvars.ContextVar[bool] = contextvars.ContextVar("flip_ties", default=False)


@contextlib.contextmanager
def flipped_ties():
    """Deliberately break ties toward the odd significand.

    Fault injection for mutation tests of the differential oracle; never use
    it otherwise.
    """
    token = _flip_ties.set(True)
    try:
        yield
    finally:
        _flip_ties.reset(token)


def fp_round(x, fmt: FloatFormat = BINARY64) -> RoundOutcome:
    """Round ``x`` to the nearest value of ``fmt``, ties to even significand.

    Raises RangeFault(OVERFLOW) when the rounded magnitude would exceed the
    largest finite value, i.e. when ``|x| >= fmt.overflow_threshold``.
    """
    if not isinstance(x, Fraction):
        x = Fraction(x)
    n, d = x.numerator, x.denominator
    if n == 0:
        return RoundOutcome(x, False, Direction.EXACT)
    a = -n if n < 0 else n
    p = fmt.precision

    # e = floor(log2(a/d))
    e = a.bit_length() - d.bit_length()
    if e >= 0:
        if a < (d << e):
            e -= 1
    elif (a << -e) < d:
        e -= 1

    q = (e if e > fmt.emin else fmt.emin) - p + 1
    if q >= 0:
        m, r = divmod(a, d << q)
        den = d << q
    else:
        m, r = divmod(a << -q, d)
        den = d

    if r == 0:
        direction = Direction.EXACT
    else:
        twice = r << 1
        if twice < den:
            direction = Direction.DOWN
        elif twice > den:
            m += 1
            direction = Direction.UP
        else:
            if (m & 1) != _flip_ties.get():
                m += 1
            direction = Direction.TIE_TO_EVEN

    if m.bit_length() - 1 + q > fmt.emax:
        raise RangeFault(FaultKind.OVERFLOW, x)

    if n < 0:
        result = dyadic(-m, q)
        if direction is Direction.DOWN:
            direction = Direction.UP
        elif direction is Direction.UP:
            direction = Direction.DOWN
    else:
        result = dyadic(m, q)
    return RoundOutcome(result, direction is not Direction.EXACT, direction)


def to_fp(x, ledger=None) -> Fraction:
    """Executable conversion of a rational to binary64; the analog of ``(float x 0.0D0)``."""
    if not isinstance(x, Fraction):
        x = Fraction(x)
    result = fp_round(x).result
    target = resolve_ledger(ledger)
    if target is not None:
        target.record(TO_FP, (x,), result)
    return result


def ulp(x: Fraction, fmt: FloatFormat = BINARY64) -> Fraction:
    """Spacing of ``fmt`` values in the binade containing ``x``."""
    x = abs(Fraction(x))
    if x == 0:
        e = fmt.emin
    else:
        e = x.numerator.bit_length() - x.denominator.bit_length()
        if Fraction(2) ** e > x:
            e -= 1
        e = max(e, fmt.emin)
    return Fraction(2) ** (e - fmt.precision + 1)


@functools.lru_cache(maxsize=16)
def _candidate_table(fmt: FloatFormat) -> tuple[int, tuple[tuple[int, bool, bool], ...]]:
    # Every value of fmt is an integer multiple of the smallest subnormal.
    # Consecutive non-negative values alternate significand parity, so the
    # parity of a value is its index among the non-negative values.
    values = enumerate_values(fmt)
    qexp = fmt.quantum_exponent
    nonneg = [v for v in values if v >= 0]
    top = Fraction(2) ** (fmt.emax + 1)
    rows = []
    for index, v in enumerate(nonneg + [top]):
        scaled = v * Fraction(2) ** -qexp
        assert scaled.denominator == 1
        odd = bool(index & 1)
        virtual = v == top
        rows.append((int(scaled), odd, virtual))
        if v:
            rows.append((-int(scaled), odd, virtual))
    return qexp, tuple(rows)


def round_generic_bruteforce(x, fmt: FloatFormat) -> Fraction:
    """Nearest value of ``fmt`` by linear scan over every value.

    Independent oracle for :func:`fp_round` on enumerable formats.  The
    candidate ``2**(emax+1)`` stands in for overflow: winning with it raises
    RangeFault(OVERFLOW), matching IEEE's unbounded-exponent rounding rule.
    """
    x = Fraction(x)
    qexp, rows = _candidate_table(fmt)
    # distance to candidate V * 2**qexp is |n * 2**-qexp - V * d| / d
    if qexp <= 0:
        target, scale = x.numerator << -qexp, x.denominator
    else:
        target, scale = x.numerator, x.denominator << qexp
    best = None
    for value, odd, virtual in rows:
        key = (abs(target - value * scale), odd)
        if best is None or key < best[0]:
            best = (key, value, virtual)
    _, value, virtual = best
    if virtual:
        raise RangeFault(FaultKind.OVERFLOW, x)
    return value * Fraction(2) ** qexp
