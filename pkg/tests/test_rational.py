import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rafloat.rational import (
    Ordering,
    format_rational,
    is_canonical,
    parse_rational,
    rat_add,
    rat_cmp,
    rat_div,
    rat_make,
    rat_mul,
    rat_scale_pow2,
    rat_sub,
)

rationals = st.builds(
    Fraction,
    st.integers(min_value=-(10**30), max_value=10**30),
    st.integers(min_value=1, max_value=10**30),
)


@pytest.mark.parametrize(
    "n, d, expected",
    [(2, 4, (1, 2)), (3, -6, (-1, 2)), (0, 7, (0, 1)), (-4, -8, (1, 2))],
)
def test_make_is_canonical(n, d, expected):
    r = rat_make(n, d)
    assert (r.numerator, r.denominator) == expected
    assert is_canonical(r)


def test_make_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        rat_make(1, 0)


def test_examples():
    assert rat_add(Fraction(1, 10), Fraction(2, 10)) == Fraction(3, 10)
    assert rat_add(Fraction(1, 3), Fraction(-1, 3)) == rat_make(0, 1)
    assert rat_mul(Fraction(2, 3), Fraction(3, 2)) == 1
    assert rat_sub(Fraction(1), Fraction(1)) == 0
    assert rat_div(Fraction(1, 3), Fraction(1, 3)) == 1
    with pytest.raises(ZeroDivisionError):
        rat_div(Fraction(1), Fraction(0))


def test_cmp_against_double_of_one_third():
    r = Fraction(6004799503160661, 18014398509481984)
    # 3 * 6004799503160661 == 2**54 - 1, so the double lies below 1/3
    assert 3 * 6004799503160661 == 2**54 - 1
    assert rat_cmp(Fraction(1, 3), r) is Ordering.GT
    assert rat_cmp(r, Fraction(1, 3)) is Ordering.LT
    assert rat_cmp(Fraction(-1, 2), Fraction(0)) is Ordering.LT


def test_scale_pow2():
    assert rat_scale_pow2(Fraction(3, 4), 2) == 3
    assert rat_scale_pow2(Fraction(1), -1074) == Fraction(1, 2**1074)


@given(rationals, st.integers(min_value=-2000, max_value=2000))
def test_scale_inverse(a, k):
    assert rat_scale_pow2(rat_scale_pow2(a, k), -k) == a
    assert is_canonical(rat_scale_pow2(a, k))


@given(rationals, rationals, rationals)
def test_field_laws(a, b, c):
    assert rat_add(a, b) == rat_add(b, a)
    assert rat_add(rat_add(a, b), c) == rat_add(a, rat_add(b, c))
    assert rat_mul(rat_mul(a, b), c) == rat_mul(a, rat_mul(b, c))
    assert rat_mul(a, rat_add(b, c)) == rat_add(rat_mul(a, b), rat_mul(a, c))
    for r in (rat_add(a, b), rat_sub(a, b), rat_mul(a, b)):
        assert is_canonical(r)
        assert gcd(r.numerator, r.denominator) == 1


@given(rationals, rationals)
def test_cmp_agrees_with_sign_of_difference(a, b):
    diff = rat_sub(a, b)
    expected = Ordering.LT if diff < 0 else Ordering.GT if diff > 0 else Ordering.EQ
    assert rat_cmp(a, b) is expected
    assert rat_cmp(a, a) is Ordering.EQ


def test_text_round_trip():
    rng = random.Random(3)
    for _ in range(1000):
        r = Fraction(rng.randint(-10**20, 10**20), rng.randint(1, 10**20))
        assert parse_rational(format_rational(r)) == r
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 3)) == "-1/3"
    with pytest.raises(ValueError):
        parse_rational("1.5")
