"""Value-level and bit-level model of IEEE binary floating-point formats.

A format is described by its precision and exponent range only.  binary64 is
``FloatFormat(53, -1022, 1023)``; tiny formats such as ``FloatFormat(4, -2, 2)``
are small enough to enumerate and serve as brute-force oracles in tests.

The logical model has no signed zero, infinities or NaN.  Those appear only
in :class:`Binary64Value`, which exists to decode whatever native hardware
hands back.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class FloatFormat:
    precision: int
    emin: int
    emax: int

    def __post_init__(self):
        if self.precision < 2:
            raise ValueError("precision must be at least 2")
        if not self.emin < 0 < self.emax:
            raise ValueError("exponent range must satisfy emin < 0 < emax")

    @functools.cached_property
    def quantum_exponent(self) -> int:
        """Exponent of the smallest subnormal, the fixed quantum below 2**emin."""
        return self.emin - self.precision + 1

    @property
    def min_subnormal(self) -> Fraction:
        return _pow2(self.quantum_exponent)

    @property
    def min_normal(self) -> Fraction:
        return _pow2(self.emin)

    @property
    def max_finite(self) -> Fraction:
        p = self.precision
        return ((1 << p) - 1) * _pow2(self.emax - p + 1)

    @property
    def overflow_threshold(self) -> Fraction:
        """Smallest magnitude that rounds past max_finite: 2**(emax+1) - 2**(emax-p)."""
        return _pow2(self.emax + 1) - _pow2(self.emax - self.precision)

    @functools.cached_property
    def exponent_bits(self) -> int:
        """Width of the biased exponent field; only defined for interchange layouts."""
        w = (self.emax + 1).bit_length()
        if self.emax != (1 << (w - 1)) - 1 or self.emin != 1 - self.emax:
            raise ValueError(f"{self} has no IEEE interchange bit layout")
        return w

    @functools.cached_property
    def width(self) -> int:
        return 1 + self.exponent_bits + self.precision - 1

    def value_count(self) -> int:
        half = 1 << (self.precision - 1)
        positive = half * (self.emax - self.emin + 1) + half - 1
        return 2 * positive + 1


BINARY64 = FloatFormat(53, -1022, 1023)


def _pow2(k: int) -> Fraction:
    return Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k)


def dyadic(m: int, k: int) -> Fraction:
    """``m * 2**k`` as a Fraction, reducing by shifts instead of gcd."""
    if m == 0:
        return Fraction(0)
    if k >= 0:
        return _coprime(m << k, 1)
    tz = (m & -m).bit_length() - 1
    if tz >= -k:
        return _coprime(m >> -k, 1)
    return _coprime(m >> tz, 1 << (-k - tz))


if hasattr(Fraction, "_from_coprime_ints"):  # 3.12+
    _coprime = Fraction._from_coprime_ints
else:

    def _coprime(n: int, d: int) -> Fraction:
        return Fraction(n, d, _normalize=False)


class ValueClass(enum.Enum):
    FINITE = "finite"
    POS_INF = "+inf"
    NEG_INF = "-inf"
    NAN = "nan"


@dataclass(frozen=True)
class Binary64Value:
    cls: ValueClass
    value: Fraction | None = None
    negative_zero: bool = False

    def __post_init__(self):
        if self.cls is ValueClass.FINITE:
            if self.value is None:
                raise ValueError("finite datum needs a value")
        elif self.value is not None:
            raise ValueError(f"{self.cls.name} carries no value")
        if self.negative_zero and self.value != 0:
            raise ValueError("negative_zero requires value 0")

    @classmethod
    def finite(cls, value: Fraction, negative_zero: bool = False) -> "Binary64Value":
        return cls(ValueClass.FINITE, Fraction(value), negative_zero)

    @property
    def is_finite(self) -> bool:
        return self.cls is ValueClass.FINITE


class EncodingError(ValueError):
    """A rational with no exact encoding in the target format."""


class FormatTooLarge(ValueError):
    pass


def decompose(x: Fraction) -> tuple[int, int, int]:
    """Split a dyadic rational into ``(sign, odd, exp)`` with ``x = (-1)**sign * odd * 2**exp``.

    ``odd`` is 0 for zero.  Raises ValueError if the denominator is not a power of two.
    """
    n, d = x.numerator, x.denominator
    if d & (d - 1):
        raise ValueError(f"{x} is not dyadic")
    if n == 0:
        return 0, 0, 0
    sign = 1 if n < 0 else 0
    n = abs(n)
    tz = (n & -n).bit_length() - 1
    return sign, n >> tz, tz - (d.bit_length() - 1)


def fpp(x, fmt: FloatFormat = BINARY64) -> bool:
    """True iff ``x`` is a rational equal to some finite value of ``fmt``."""
    if type(x) is not Fraction:
        if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
            return False
        x = Fraction(x)
    n, d = x.numerator, x.denominator
    if d & (d - 1):
        return False
    if n == 0:
        return True
    if n < 0:
        n = -n
    tz = (n & -n).bit_length() - 1
    odd_bits = n.bit_length() - tz
    exp = tz - d.bit_length() + 1
    return odd_bits <= fmt.precision and exp + odd_bits - 1 <= fmt.emax and exp >= fmt.quantum_exponent


def bits_to_value(bits: int, fmt: FloatFormat = BINARY64) -> Binary64Value:
    width, w, p = fmt.width, fmt.exponent_bits, fmt.precision
    if not 0 <= bits < (1 << width):
        raise ValueError(f"bit pattern 0x{bits:X} wider than {width} bits")
    sign = bits >> (width - 1)
    biased = (bits >> (p - 1)) & ((1 << w) - 1)
    frac = bits & ((1 << (p - 1)) - 1)
    if biased == (1 << w) - 1:
        if frac:
            return Binary64Value(ValueClass.NAN)
        return Binary64Value(ValueClass.NEG_INF if sign else ValueClass.POS_INF)
    if biased == 0:
        sig, exp = frac, fmt.quantum_exponent
    else:
        sig, exp = (1 << (p - 1)) | frac, biased - fmt.emax - p + 1
    if sign:
        return Binary64Value(ValueClass.FINITE, dyadic(-sig, exp), negative_zero=(sig == 0))
    return Binary64Value(ValueClass.FINITE, dyadic(sig, exp))


def rational_to_bits(x: Fraction, fmt: FloatFormat = BINARY64, negative_zero: bool = False) -> int:
    """Encode a representable rational; raises EncodingError otherwise."""
    if not fpp(x, fmt):
        raise EncodingError(f"{x} is not representable in {fmt}")
    return _encode(x, fmt, negative_zero)


def _encode(x: Fraction, fmt: FloatFormat, negative_zero: bool = False) -> int:
    # caller has checked fpp(x, fmt)
    width, p = fmt.width, fmt.precision
    n, d = x.numerator, x.denominator
    if n == 0:
        return (1 << (width - 1)) if negative_zero else 0
    sign = 0
    if n < 0:
        sign, n = 1, -n
    k = d.bit_length() - 1  # |x| = n / 2**k
    top = n.bit_length() - 1 - k
    if top >= fmt.emin:
        shift = p - 1 - top - k  # significand = n * 2**(p-1-top) / 2**k
        sig = n << shift if shift >= 0 else n >> -shift
        field = ((top + fmt.emax) << (p - 1)) | (sig - (1 << (p - 1)))
    else:
        shift = k + fmt.quantum_exponent
        field = n << -shift if shift <= 0 else n >> shift
    return (sign << (width - 1)) | field


def value_to_bits(v: Binary64Value, fmt: FloatFormat = BINARY64) -> int:
    width, w, p = fmt.width, fmt.exponent_bits, fmt.precision
    inf = ((1 << w) - 1) << (p - 1)
    if v.cls is ValueClass.POS_INF:
        return inf
    if v.cls is ValueClass.NEG_INF:
        return (1 << (width - 1)) | inf
    if v.cls is ValueClass.NAN:
        return inf | (1 << (p - 2))
    return rational_to_bits(v.value, fmt, v.negative_zero)


def enumerate_values(fmt: FloatFormat, limit: int = 1 << 16) -> list[Fraction]:
    """All finite values of ``fmt`` in ascending order, zero included once."""
    count = fmt.value_count()
    if count > limit:
        raise FormatTooLarge(f"{fmt} has {count} values, more than the limit {limit}")
    p = fmt.precision
    q = _pow2(fmt.quantum_exponent)
    positive = [k * q for k in range(1, 1 << (p - 1))]
    for e in range(fmt.emin, fmt.emax + 1):
        step = _pow2(e - p + 1)
        positive.extend(m * step for m in range(1 << (p - 1), 1 << p))
    return [-v for v in reversed(positive)] + [Fraction(0)] + positive


def format_bits(bits: int, fmt: FloatFormat = BINARY64) -> str:
    digits = (fmt.width + 3) // 4
    return f"0x{bits:0{digits}X}"


def parse_bits(text: str) -> int:
    text = text.strip()
    if not text.lower().startswith("0x"):
        raise ValueError(f"bit pattern must start with 0x: {text!r}")
    return int(text, 16)
