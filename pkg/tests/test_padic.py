from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from heegnerpadic.padic import (
    INF, ExpDivergence, NoSquareRoot, PadicElem, QuadElem, frobenius, log_iw, nonresidue, norm,
    parse_quad, pow_s, sqrt,
)

p = 3
r = nonresidue(p)


def Q(a, b=0, prec=30):
    return QuadElem.from_rationals(p, a, b, prec)


def test_identity_and_inverse():
    x = Q(5, 7)
    assert Q(1) * x == x
    y = Q(2, 1, 10)
    assert y * y.inverse() == Q(1)


def test_integer_square_matches_base_p_digits():
    # oracle: 16 = 1 + 2*3 + 1*3^2 written out digit by digit
    x = Q(1 + 3)
    digits, v = [], 16
    while v:
        digits.append(v % 3)
        v //= 3
    assert digits == [1, 2, 1]
    assert x * x == Q(sum(d * 3 ** k for k, d in enumerate(digits)))


def test_sqrt_basics():
    assert sqrt(Q(1)) == Q(1)
    x = Q(4, 7)
    s = sqrt(x * x)
    assert s == x or s == -x


def test_sqrt_minus_19_in_unramified_quadratic():
    # -19 is a non-square mod 3, so the root lives in Q_9 and must square back
    s = sqrt(Q(-19))
    assert not s.b.is_zero()
    assert s * s == Q(-19)


def test_sqrt_rejects_odd_valuation():
    with pytest.raises(NoSquareRoot):
        sqrt(Q(3))


def test_log_of_one_and_p():
    assert log_iw(Q(1)).is_zero()
    assert log_iw(Q(3)).is_zero()


def test_log_one_plus_p_against_series():
    N = 20
    oracle = sum(Fraction((-1) ** (k + 1) * 3 ** k, k) for k in range(1, 60))
    got = log_iw(Q(4, 0, N))
    assert got.absprec >= N - 3
    assert got == QuadElem.from_rationals(p, oracle, 0, N + 5)


def test_pow_s():
    x = Q(4, 3)
    assert pow_s(x, 0) == Q(1)
    assert pow_s(Q(1 + p), 2) == Q((1 + p) ** 2)
    h = pow_s(Q(1 + p), Fraction(1, 2))
    assert h * h == Q(1 + p)


def test_pow_s_outside_disc():
    with pytest.raises(ExpDivergence):
        pow_s(Q(2), Fraction(1, 3))


def test_frobenius_and_norm():
    x = Q(2, 5)
    assert frobenius(frobenius(x)) == x
    assert norm(QuadElem.omega(p)) == -r
    assert norm(Q(2, 1)) == 4 - r


def test_render_roundtrip():
    x = Q(Fraction(7, 2), -11, 12)
    assert parse_quad(str(x), p) == x
    assert parse_quad(str(x), p).absprec == x.absprec


ints = st.integers(min_value=-10 ** 6, max_value=10 ** 6)


@st.composite
def quads(draw, unit=False):
    a, b = draw(ints), draw(ints)
    if unit and a % 3 == 0 and b % 3 == 0:
        a += 1
    return Q(a, b, 25)


@settings(max_examples=60, deadline=None)
@given(quads(), quads(), quads())
def test_field_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert (x + y) - y == x


@settings(max_examples=60, deadline=None)
@given(quads(unit=True))
def test_inverse_property(x):
    assert x * x.inverse() == Q(1)


@settings(max_examples=40, deadline=None)
@given(quads(unit=True), quads(unit=True))
def test_log_additive_on_norm_one(x, y):
    a, b = x / frobenius(x), y / frobenius(y)
    assert norm(a) == 1
    assert log_iw(a * b) == log_iw(a) + log_iw(b)


@settings(max_examples=40, deadline=None)
@given(ints, ints, st.integers(-30, 30), st.integers(-30, 30))
def test_pow_exponent_law(a, b, s, t):
    x = Q(1 + 3 * a, 3 * b)
    assert pow_s(x, s + t) == pow_s(x, s) * pow_s(x, t)


@settings(max_examples=60, deadline=None)
@given(ints, ints)
def test_sigma_fixes_exactly_qp(a, b):
    x = Q(a, b)
    assert (frobenius(x) == x) == (b == 0)


def test_padic_zero_precision():
    z = PadicElem.zero(p)
    assert z.absprec == INF and z.is_zero()
