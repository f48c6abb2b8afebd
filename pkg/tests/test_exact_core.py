from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelic_roth.errors import ComplexEmbedding, NonPositiveInput
from adelic_roth.exact_core import (
    QFElement,
    QuadField,
    RealInterval,
    as_rational,
    format_element,
    interval_log,
    is_squarefree,
    parse_element,
    qf_embed,
    qf_norm,
    refine_sign,
    sqrt_interval,
)

from conftest import dec, decimal_ln

rationals = st.fractions(min_value=Fraction(-10**6), max_value=Fraction(10**6), max_denominator=10**6)
positive = st.fractions(min_value=Fraction(1, 10**6), max_value=Fraction(10**6), max_denominator=10**6)


def encloses(enc: RealInterval, value: Decimal, digits=60) -> bool:
    return dec(enc.lo, digits) <= value <= dec(enc.hi, digits)


def test_interval_log_of_one_is_tight():
    enc = interval_log(1, Fraction(1, 10**12))
    assert enc.contains(0) and enc.width <= Fraction(1, 10**12)


def test_interval_log_two_matches_decimal_oracle():
    enc = interval_log(2, Fraction(1, 10**9))
    assert enc.width <= Fraction(1, 10**9)
    assert encloses(enc, decimal_ln(Fraction(2)))
    assert abs(float(enc.mid) - 0.6931471805599453) < 1e-9


@pytest.mark.parametrize("x", [0, -1, Fraction(-3, 7)])
def test_interval_log_rejects_nonpositive(x):
    with pytest.raises(NonPositiveInput):
        interval_log(x)


def test_interval_log_rejects_interval_touching_zero():
    with pytest.raises(NonPositiveInput):
        interval_log(RealInterval(Fraction(0), Fraction(1)))


@settings(max_examples=200, deadline=None)
@given(positive, st.integers(min_value=10, max_value=120))
def test_interval_log_encloses_and_respects_width(x, bits):
    width = Fraction(1, 2**bits)
    enc = interval_log(x, width)
    assert enc.width <= width
    assert encloses(enc, decimal_ln(x))


@settings(max_examples=100, deadline=None)
@given(positive)
def test_interval_log_is_deterministic(x):
    assert interval_log(x) == interval_log(x)


@settings(max_examples=200, deadline=None)
@given(rationals, rationals)
def test_interval_arithmetic_encloses_exact_results(a, b):
    A, B = RealInterval.exact(a), RealInterval.exact(b)
    assert (A + B).contains(a + b)
    assert (A - B).contains(a - b)
    assert (A * B).contains(a * b)
    if b:
        assert (A / B).contains(a / b)


def test_interval_sign_is_undecided_across_zero():
    assert RealInterval(Fraction(-1), Fraction(1)).sign() is None
    assert RealInterval(Fraction(1), Fraction(2)).sign() == 1
    assert RealInterval.exact(0).sign() == 0


def test_sqrt_interval():
    enc = sqrt_interval(2, Fraction(1, 2**80))
    assert enc.lo**2 <= 2 <= enc.hi**2
    assert enc.width <= Fraction(1, 2**80)
    assert sqrt_interval(49).is_exact() and sqrt_interval(49).lo == 7


def test_squarefree():
    assert is_squarefree(2) and is_squarefree(-5) and is_squarefree(30)
    assert not is_squarefree(12) and not is_squarefree(49)
    with pytest.raises(ValueError):
        QuadField(4)
    with pytest.raises(ValueError):
        QuadField(1)


def test_norm_examples():
    F = QuadField(2)
    assert qf_norm(QFElement(1, 1, F)) == -1
    assert qf_norm(QFElement(1, 0, QuadField(7))) == 1
    # a rational viewed inside a quadratic field has norm a^2
    assert qf_norm(Fraction(3, 2)) == Fraction(9, 4)


field_d = st.sampled_from([2, 3, 5, 6, 7, 13, 17, -1, -3])


@settings(max_examples=200, deadline=None)
@given(field_d, rationals, rationals, rationals, rationals)
def test_norm_is_multiplicative(d, a, b, c, e):
    F = QuadField(d)
    x, y = QFElement(a, b, F), QFElement(c, e, F)
    assert qf_norm(x * y) == qf_norm(x) * qf_norm(y)
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()
    if not x.is_zero():
        assert x * x.inverse() == 1
        assert (y / x) * x == y


def test_embeddings_of_unit():
    F = QuadField(2)
    u = QFElement(3, 2, F)
    plus, minus = qf_embed(u, "plus"), qf_embed(u, "minus")
    assert (plus * minus).contains(1)
    assert plus.contains(Fraction(582842712474619, 10**14)) or abs(float(plus.mid) - 5.828427124746190) < 1e-12
    assert abs(float(minus.mid) - 0.1715728752538099) < 1e-12


def test_complex_embedding_rejected():
    with pytest.raises(ComplexEmbedding):
        qf_embed(QFElement(1, 1, QuadField(-1)))


def test_refine_sign_tightens_until_decided():
    # sqrt(2) - 1.41421356237 > 0 is only visible at width < 1e-11
    target = Fraction(141421356237, 10**11)
    assert refine_sign(lambda w: sqrt_interval(2, w) - target) == 1


@pytest.mark.parametrize("text, expected", [
    ("6", Fraction(6)),
    ("-3/7", Fraction(-3, 7)),
])
def test_parse_rationals(text, expected):
    assert parse_element(text) == expected


@pytest.mark.parametrize("text, a, b, d", [
    ("3+2√2", 3, 2, 2),
    ("sqrt(2)", 0, 1, 2),
    ("(1+sqrt(5))/2", Fraction(1, 2), Fraction(1, 2), 5),
    ("1-sqrt(3)", 1, -1, 3),
])
def test_parse_quadratic(text, a, b, d):
    x = parse_element(text)
    assert x.field.d == d and x.a == a and x.b == b
    assert parse_element(format_element(x), x.field) == x


def test_as_rational():
    assert as_rational("4/6") == Fraction(2, 3)
    with pytest.raises(TypeError):
        as_rational(0.5)
