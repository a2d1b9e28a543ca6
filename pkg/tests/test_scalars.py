from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from taulab import scalars as sc
from taulab.scalars import DomainError, HalfInt, LimitError, Rational

from conftest import small_fractions

laurent = st.lists(st.tuples(st.integers(-4, 4), small_fractions), max_size=4)


def build(terms):
    acc = Rational(0)
    for k, c in terms:
        acc = acc + sc.u_pow(k) * sc.to_scalar(c)
    return acc


def numeric(terms, u):
    return sum(float(c) * u**k for k, c in terms)


@given(laurent, laurent, laurent)
def test_field_axioms(a, b, c):
    x, y, z = build(a), build(b), build(c)
    assert x * (y + z) == x * y + x * z
    assert (x + y) - y == x
    if y != 0:
        assert (x / y) * y == x


@given(laurent, st.sampled_from([0.7, 1.3, 2.0]))
def test_evaluate_matches_direct_sum(a, u):
    assert sc.evaluate_at(build(a), u) == pytest.approx(numeric(a, u), rel=1e-12, abs=1e-12)


@given(laurent)
def test_format_parse_round_trip(a):
    x = build(a)
    assert sc.parse_scalar(sc.format_scalar(x)) == x


@given(laurent)
def test_invert_q_is_involution(a):
    x = build(a)
    assert sc.invert_q(sc.invert_q(x)) == x


@pytest.mark.parametrize("x", [0, 1, 2, 5, HalfInt(3), HalfInt(-1)])
def test_symmetric_qnum_is_bar_invariant_and_classical(x):
    v = sc.qnum(x)
    assert sc.invert_q(v) == v
    assert sc.at_u1(v) == Rational(HalfInt.of(x).twice, 2)


@pytest.mark.parametrize("n", range(0, 7))
def test_nonsymmetric_qnum_is_geometric_sum(n):
    expect = sum((sc.u_pow(4 * k) for k in range(n)), Rational(0))
    assert sc.qnum(n, sc.NONSYMMETRIC) == expect
    assert sc.qnum_base(n, 4) == expect


@pytest.mark.parametrize("n", range(0, 6))
def test_qfactorial_limit(n):
    import math

    assert sc.at_u1(sc.qfactorial(n)) == math.factorial(n)
    assert sc.at_u1(sc.qfactorial_base(n, -4)) == math.factorial(n)


def test_qnum_numeric_value():
    u = 1.1
    assert sc.evaluate_at(sc.qnum(3), u) == pytest.approx((u**6 - u**-6) / (u**2 - u**-2))


def test_qgamma_ratio_vanishes_past_spin():
    assert sc.qgamma_ratio(HalfInt(2), 3) == 0
    assert sc.at_u1(sc.qgamma_ratio(HalfInt(3), 2)) == 6  # [3][2] -> 3 * 2


@pytest.mark.parametrize("k", range(0, 6))
def test_qexp_coefficients(k):
    assert sc.qexp_coeff(k) * sc.qfactorial(k) == 1
    assert sc.qexp_coeff(k, sc.E_Q_NONSYM) * sc.qfactorial_base(k, 4) == 1


def test_pole_at_u1_raises():
    with pytest.raises(LimitError):
        sc.at_u1(1 / (sc.u_pow(2) - 1))


@given(st.integers(-20, 20), st.integers(-20, 20))
def test_halfint_arithmetic(a, b):
    x, y = HalfInt(a), HalfInt(b)
    assert (x + y).twice == a + b
    assert (x - y).value == Fraction(a - b, 2)
    assert HalfInt.of(str(x)) == x


def test_halfint_rejects_thirds():
    with pytest.raises(DomainError):
        HalfInt.of(Fraction(1, 3))
    with pytest.raises(TypeError):
        HalfInt.of(True)


def test_unknown_variant():
    with pytest.raises(DomainError):
        sc.qnum(1, "other")
