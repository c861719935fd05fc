from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import dyadics, frac
from lenode.dyadic import (
    EQ,
    GT,
    LT,
    Dyadic,
    as_dyadic,
    bit_length,
    dy_add,
    dy_cmp,
    dy_div2,
    dy_mul,
    dy_neg,
    dy_round,
    dy_sub,
    parse_dyadic,
)


def test_add_examples():
    assert dy_add(Dyadic(1, 1), Dyadic(1, 2)) == Dyadic(3, 2)
    assert dy_mul(Dyadic(3, 3), Dyadic(5, 2)) == Dyadic(15, 5)
    assert dy_sub(Dyadic(1), Dyadic(1, 1)) == Dyadic(1, 1)
    assert dy_neg(Dyadic(3, 2)) == Dyadic(-3, 2)


def test_div2_examples():
    assert dy_div2(Dyadic(1)) == Dyadic(1, 1)
    assert dy_div2(Dyadic(0)) == Dyadic(0)
    assert dy_div2(Dyadic(3, 2)) == Dyadic(3, 3)
    assert dy_div2(Dyadic(6)) == Dyadic(3)


def test_round_examples():
    # 5/8 = 0.101b: 1/2 is 1/8 away, 1 is 3/8 away
    assert dy_round(Dyadic(5, 3), 1) == Dyadic(1, 1)
    assert dy_round(Dyadic(7, 3), 0) == Dyadic(1)
    assert dy_round(Dyadic(3, 2), 5) == Dyadic(3, 2)
    # ties go to the even mantissa
    assert dy_round(Dyadic(1, 1), 0) == Dyadic(0)
    assert dy_round(Dyadic(3, 1), 0) == Dyadic(2)
    assert dy_round(Dyadic(-3, 1), 0) == Dyadic(-2)


def test_cmp_examples():
    assert dy_cmp(Dyadic(1, 2), Dyadic(3, 2)) == LT
    assert dy_cmp(Dyadic(5, 3), Dyadic(5, 3)) == EQ
    assert dy_cmp(Dyadic(5, 3), Dyadic(9, 4)) == GT


def test_canonical_form():
    d = Dyadic(12, 4)
    assert (d.mantissa, d.exponent) == (3, 2)
    assert Dyadic(0, 9).exponent == 0
    assert Dyadic(8, 2) == Dyadic(2)
    with pytest.raises(ValueError):
        Dyadic(1, -1)


def test_literals():
    assert parse_dyadic("13/2^3") == Dyadic(13, 3)
    assert parse_dyadic("5.5") == Dyadic(11, 1)
    assert parse_dyadic("-0.75") == Dyadic(-3, 2)
    assert parse_dyadic("42") == Dyadic(42)
    for bad in ("0.1", "1/3", "x", "1/2^-1"):
        with pytest.raises(ValueError):
            parse_dyadic(bad)
    assert as_dyadic(Fraction(3, 8)) == Dyadic(3, 3)
    with pytest.raises(TypeError):
        as_dyadic(0.5)


def test_rendering():
    assert str(Dyadic(8)) == "8"
    assert str(Dyadic(683, 11)) == "683/2^11"
    assert Dyadic(683, 11).decimal() == "0.33349609375"
    assert Dyadic(-3, 2).decimal() == "-0.75"
    assert Dyadic(-5, 1).decimal() == "-2.5"


def test_bit_length():
    assert [bit_length(n) for n in (0, 1, 2, 3, 4, 7, 8, 13)] == [0, 1, 2, 2, 3, 3, 4, 4]
    with pytest.raises(ValueError):
        bit_length(-1)


@given(st.integers(min_value=-(2**70), max_value=2**70), st.integers(min_value=0, max_value=80))
def test_canonical_idempotent(m, e):
    d = Dyadic(m, e)
    assert d.exponent == 0 or d.mantissa % 2 == 1
    assert Dyadic(d.mantissa, d.exponent) == d
    assert frac(d) == Fraction(m, 2**e)


@given(dyadics(), dyadics(), dyadics())
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert frac(a + b) == frac(a) + frac(b)
    assert frac(a * b) == frac(a) * frac(b)
    assert a - a == 0 and a + 0 == a


@given(dyadics(), dyadics())
def test_order_agrees_with_rationals(a, b):
    assert (a < b) == (frac(a) < frac(b))
    assert (a == b) == (frac(a) == frac(b))
    assert dy_cmp(a, b) == (frac(a) > frac(b)) - (frac(a) < frac(b))


@given(dyadics(max_exp=90), st.integers(min_value=0, max_value=64))
def test_round_bound(a, n):
    r = dy_round(a, n)
    assert r.exponent <= n
    err = abs(frac(r) - frac(a))
    assert err <= Fraction(1, 2 ** (n + 1))
    # nearest: no multiple of 2^-n is strictly closer
    step = Fraction(1, 2**n)
    assert err <= abs(frac(r) + step - frac(a)) and err <= abs(frac(r) - step - frac(a))


@given(dyadics())
def test_half_then_double(a):
    h = dy_div2(a)
    assert h + h == a
    assert h.exponent <= a.exponent + 1
