import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelic_roth.adelic import LogValue, Place, abs_log, log_max
from adelic_roth.errors import ZeroPolynomial
from adelic_roth.heights import local_height_poly
from adelic_roth.mvpoly import MvPoly, d_index, derivative_height_check

coeff = st.fractions(min_value=-20, max_value=20, max_denominator=6)
point_coord = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def polys(nvars, max_deg=3, max_terms=6):
    exps = st.tuples(*[st.integers(0, max_deg)] * nvars)
    return st.dictionaries(exps, coeff, max_size=max_terms).map(lambda t: MvPoly(t, nvars))


def points(nvars):
    return st.tuples(*[point_coord] * nvars)


def brute_index(P, alpha, d):
    """min sum i_j/d_j over all i in the degree box with Delta^i P(alpha) != 0."""
    best = None
    for i in itertools.product(*[range(k + 1) for k in P.degrees()]):
        if P.delta_derivative(i).evaluate(alpha) != 0:
            w = sum(Fraction(a) / x for a, x in zip(i, d))
            best = w if best is None else min(best, w)
    return best


X1, X2 = MvPoly.variable(0, 2), MvPoly.variable(1, 2)
X = MvPoly.variable(0, 1)


def test_delta_derivative_examples():
    assert (X**4).delta_derivative((2,)) == 6 * X**2
    assert (X1**2 * X2).delta_derivative((1, 1)) == 2 * X1
    P = 3 * X1**2 + X2 - 7
    assert P.delta_derivative((0, 0)) == P


def test_zero_coefficients_are_dropped():
    P = MvPoly({(1, 0): 0, (0, 0): 3}, 2)
    assert P.terms == {(0, 0): 3}
    assert (X1 - X1).is_zero()


def test_d_index_examples():
    P = (X1 - 1) ** 2 * (X2 - 2)
    assert d_index(P, (1, 2), (4, 2)) == 1
    assert d_index(X1**2, (0, 0), (5, 3)) == Fraction(2, 5)
    assert d_index(X1 + 1, (0, 0), (1, 1)) == 0
    with pytest.raises(ZeroPolynomial):
        d_index(MvPoly({}, 2), (0, 0), (1, 1))


def test_translate_examples():
    assert (X**2).translate((1,)) == X**2 + 2 * X + 1
    P = 3 * X1**2 * X2 - X2
    assert P.translate((0, 0)) == P


@settings(max_examples=150, deadline=None)
@given(polys(2), polys(2), polys(2), points(2))
def test_ring_operations_and_evaluation(P, Q, R, x):
    assert (P + Q) * R == P * R + Q * R
    assert (P * Q).evaluate(x) == P.evaluate(x) * Q.evaluate(x)
    assert (P - Q).evaluate(x) == P.evaluate(x) - Q.evaluate(x)


@settings(max_examples=150, deadline=None)
@given(polys(2), polys(2))
def test_exact_division_recovers_factor(P, Q):
    if Q.is_zero():
        return
    assert (P * Q).exact_div(Q) == P


def test_inexact_division_raises():
    with pytest.raises(ArithmeticError):
        (X1**2 + 1).exact_div(X1 + 1)


@settings(max_examples=150, deadline=None)
@given(polys(3, 3, 5), points(3), points(3))
def test_translate_matches_evaluation(P, alpha, x):
    shifted = P.translate(alpha)
    assert shifted.evaluate(x) == P.evaluate(tuple(a + b for a, b in zip(x, alpha)))
    assert shifted.translate(tuple(-a for a in alpha)) == P


@settings(max_examples=150, deadline=None)
@given(polys(2, 4), st.tuples(st.integers(0, 2), st.integers(0, 2)), st.tuples(st.integers(0, 2), st.integers(0, 2)))
def test_derivatives_compose_with_binomial(P, i, j):
    lhs = P.delta_derivative(j).delta_derivative(i)
    total = tuple(a + b for a, b in zip(i, j))
    factor = math.prod(math.comb(a + b, a) for a, b in zip(i, j))
    assert lhs == P.delta_derivative(total) * factor


@settings(max_examples=100, deadline=None)
@given(polys(2), points(2))
def test_taylor_coefficients_are_derivatives(P, alpha):
    shifted = P.translate(alpha)
    for i in itertools.product(*[range(k + 1) for k in P.degrees()]):
        assert shifted.terms.get(i, 0) == P.delta_derivative(i).evaluate(alpha)


d_weights = st.tuples(*[st.fractions(min_value=1, max_value=5, max_denominator=3)] * 2)


@settings(max_examples=150, deadline=None)
@given(polys(2), points(2), d_weights)
def test_d_index_matches_brute_force(P, alpha, d):
    if P.is_zero():
        return
    assert d_index(P, alpha, d) == brute_index(P, alpha, d)


@settings(max_examples=100, deadline=None)
@given(polys(2, 3, 4), polys(2, 3, 4), st.sampled_from([(0, 0), (1, 1), (1, -1), (2, 0)]), d_weights)
def test_d_index_is_additive(P, Q, alpha, d):
    if P.is_zero() or Q.is_zero():
        return
    assert brute_index(P * Q, alpha, d) == brute_index(P, alpha, d) + brute_index(Q, alpha, d)
    assert d_index(P * Q, alpha, d) == d_index(P, alpha, d) + d_index(Q, alpha, d)


def test_derivative_height_check_example():
    r = derivative_height_check(X + 1, (1,), Place.infinity())
    assert r.lhs == LogValue.log_prime(2)
    assert r.rhs == LogValue.log_prime(2, 2)
    assert r.holds
    c = derivative_height_check(MvPoly.constant(5, 2), (3, 4), Place.infinity())
    assert c.lhs == c.rhs == LogValue.log_rational(5)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeff, min_size=1, max_size=16),
       points(2), st.sampled_from([Place.infinity(), Place.finite(2), Place.finite(5)]))
def test_derivative_height_bound_holds(terms, alpha, place):
    P = MvPoly(terms, 2)
    if P.is_zero():
        return
    r = derivative_height_check(P, alpha, place)
    assert r.holds
    # lhs is the max over every i of log|Delta^i P(alpha)|
    vals = [P.delta_derivative(i).evaluate(alpha)
            for i in itertools.product(*[range(k + 1) for k in P.degrees()])]
    assert r.lhs == log_max(abs_log(v, place) for v in vals if v != 0)


@settings(max_examples=60, deadline=None)
@given(polys(2), st.sampled_from([Place.infinity(), Place.finite(3)]))
def test_local_height_reads_coefficients_through_derivatives(P, place):
    if P.is_zero():
        return
    at_zero = [P.delta_derivative(i).evaluate((0, 0))
               for i in itertools.product(*[range(k + 1) for k in P.degrees()])]
    assert local_height_poly(P, place) == log_max(abs_log(v, place) for v in at_zero if v != 0)
