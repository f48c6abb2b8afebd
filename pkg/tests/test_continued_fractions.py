import math
from decimal import Decimal, localcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelic_roth.continued_fractions import convergents, partial_quotients, pell_fundamental, pell_power
from adelic_roth.errors import NonQuadraticAlpha, SquareInput
from adelic_roth.exact_core import QFElement, QuadField, parse_element


def float_cf(x: Decimal, count: int):
    out = []
    for _ in range(count):
        a = math.floor(x)
        out.append(a)
        x = 1 / (x - a)
    return out


def test_known_expansions():
    assert partial_quotients(parse_element("sqrt(2)"), 6) == [1, 2, 2, 2, 2, 2]
    assert partial_quotients(parse_element("(1+sqrt(5))/2"), 6) == [1] * 6
    assert partial_quotients(parse_element("sqrt(7)"), 9) == [2, 1, 1, 1, 4, 1, 1, 1, 4]
    assert list(convergents([1, 2, 2, 2, 2]))[-1] == Fraction(41, 29)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5, 6, 7, 10, 11, 13, 19, 23]),
       st.integers(-20, 20), st.integers(1, 9).flatmap(lambda b: st.sampled_from([b, -b])),
       st.integers(1, 5))
def test_partial_quotients_match_high_precision(d, a, b, c):
    x = QFElement(Fraction(a, c), Fraction(b, c), QuadField(d))
    with localcontext() as ctx:
        ctx.prec = 80
        value = (Decimal(a) + Decimal(b) * Decimal(d).sqrt()) / c
        assert partial_quotients(x, 15) == float_cf(value, 15)


def test_rational_alpha_rejected():
    with pytest.raises(NonQuadraticAlpha):
        partial_quotients(Fraction(4), 5)


@pytest.mark.parametrize("D, sol", [(2, (3, 2)), (3, (2, 1)), (5, (9, 4)), (61, (1766319049, 226153980))])
def test_pell_fundamental(D, sol):
    assert pell_fundamental(D) == sol


@pytest.mark.parametrize("D", [2, 3, 5, 7, 13])
def test_pell_powers_solve_the_equation(D):
    for k in range(1, 8):
        a, b = pell_power(D, k)
        assert a * a - D * b * b == 1
    a1, b1 = pell_fundamental(D)
    a2, b2 = pell_power(D, 2)
    assert (a2, b2) == (a1 * a1 + D * b1 * b1, 2 * a1 * b1)


def test_pell_square_rejected():
    with pytest.raises(SquareInput):
        pell_fundamental(9)
