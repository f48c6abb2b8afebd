import math
from decimal import Decimal
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import primerange
from sympy.ntheory import sqrt_mod

from adelic_roth.adelic import (
    AdelicCurve,
    LogValue,
    Place,
    abs_log,
    extend_places,
    factor_rational,
    fiber_average,
    log_max,
    log_minus,
    log_plus,
    norm_formula_check,
    ord_p,
    product_formula_defect,
    pushforward_integral,
)
from adelic_roth.errors import ComplexEmbedding, MissingFiberValue, ZeroElement
from adelic_roth.exact_core import QFElement, QuadField, qf_embed

from conftest import dec, decimal_ln

nonzero_rationals = st.fractions(min_value=Fraction(-10**6), max_value=Fraction(10**6),
                                 max_denominator=10**6).filter(lambda x: x != 0)
small = st.fractions(min_value=Fraction(-200), max_value=Fraction(200), max_denominator=50)


def qf_elements(d):
    return st.builds(lambda a, b: QFElement(a, b, QuadField(d)), small, small).filter(lambda x: not x.is_zero())


def test_ord_and_factor():
    assert ord_p(Fraction(12, 5), 2) == 2
    assert ord_p(Fraction(12, 5), 5) == -1
    assert factor_rational(Fraction(-12, 35)) == {2: 2, 3: 1, 5: -1, 7: -1}


def test_logvalue_is_exact_and_canonical():
    six = LogValue.log_rational(6)
    assert six == LogValue.log_prime(2) + LogValue.log_prime(3)
    assert (six - six).is_zero()
    assert (LogValue.log_rational(Fraction(1, 6)) + six).is_zero()
    assert abs(float(six) - math.log(6)) < 1e-15
    assert six.sign() == 1 and (-six).sign() == -1 and LogValue().sign() == 0


def test_logvalue_sign_refines_close_values():
    # 2^10 = 1024 > 1000 = 10^3 by a relative margin of about 2%
    diff = LogValue.log_prime(2, 10) - LogValue.log_rational(1000)
    assert diff.sign() == 1
    # 3^12 = 531441, 2^19 = 524288: ln ratio ~ 0.0136
    assert (LogValue.log_prime(3, 12) - LogValue.log_prime(2, 19)).sign() == 1


def test_log_plus_minus_max():
    a = LogValue.log_rational(Fraction(1, 3))
    assert log_plus(a).is_zero() and log_minus(a) == a
    assert log_max([a, LogValue.log_prime(2), LogValue()]) == LogValue.log_prime(2)


def test_product_formula_of_six_shows_each_place():
    Q = AdelicCurve.rationals()
    places = Q.places_for([6])
    assert [str(w) for w in places] == ["Q:inf", "Q:p=2", "Q:p=3"]
    assert abs_log(6, Place.infinity()) == LogValue.log_rational(6)
    assert abs_log(6, Place.finite(2)) == LogValue.log_prime(2, -1)
    assert product_formula_defect(6, Q) == LogValue()


def test_product_formula_rejects_zero():
    with pytest.raises(ZeroElement):
        product_formula_defect(0, AdelicCurve.rationals())


@settings(max_examples=300, deadline=None)
@given(nonzero_rationals, st.fractions(min_value=Fraction(1, 10), max_value=1))
def test_product_formula_over_q(a, kappa):
    defect = product_formula_defect(a, AdelicCurve.rationals(kappa))
    assert defect.is_zero()


@pytest.mark.parametrize("d", [2, 3, 5, 17, 41])
def test_product_formula_over_quadratic_fields(d):
    curve = AdelicCurve.quadratic(d)
    rng = random.Random(d)
    for _ in range(40):
        x = QFElement(Fraction(rng.randint(-999, 999), rng.randint(1, 99)),
                      Fraction(rng.randint(-999, 999), rng.randint(1, 99)), curve.field)
        if x.is_zero():
            continue
        defect = product_formula_defect(x, curve)
        assert not defect.finite_part and not defect.unit_part
        assert defect.interval(Fraction(1, 10**9)).contains(0)


def test_archimedean_value_matches_embedding():
    F = QuadField(2)
    x = QFElement(Fraction(7, 3), -5, F)
    for emb in ("plus", "minus"):
        v = abs_log(x, Place("archimedean", embedding=emb, field_d=2)).interval(Fraction(1, 2**80))
        oracle = decimal_ln(abs(qf_embed(x, emb, Fraction(1, 2**120)).mid))
        assert v.width <= Fraction(1, 2**80)
        assert abs(dec(v.mid) - oracle) < Decimal("1e-20")


def _oracle_split_valuation(x, p, d, residue):
    """ord_nu(x) through a square root of d modulo a high power of p found by sympy."""
    den = math.lcm(x.a.denominator, x.b.denominator)
    A, B = int(x.a * den), int(x.b * den)
    K = 60
    roots = [r for r in sqrt_mod(d, p**K, all_roots=True) if r % p == residue]
    (r,) = roots
    return ord_p(Fraction(A + B * r), p) - ord_p(Fraction(den), p)


@pytest.mark.parametrize("d, p", [(2, 7), (2, 17), (5, 11), (5, 19), (17, 13), (3, 11)])
def test_split_valuations_match_independent_root(d, p):
    F = QuadField(d)
    rng = random.Random(p * d)
    fibre = extend_places(Place.finite(p), F)
    assert len(fibre) == 2 and all(fw.place.splitting == "split" for fw in fibre)
    for _ in range(30):
        x = QFElement(Fraction(rng.randint(-p**4, p**4), rng.randint(1, p**2)), rng.randint(-p**3, p**3), F)
        if x.is_zero():
            continue
        vals = []
        for fw in fibre:
            got = abs_log(x, fw.place)
            want = _oracle_split_valuation(x, p, d, fw.place.root)
            assert got == LogValue.log_prime(p, -want)
            vals.append(want)
        assert sum(vals) == ord_p(x.norm(), p)


def test_two_adic_split_places():
    F = QuadField(17)
    fibre = extend_places(Place.finite(2), F)
    assert [fw.place.splitting for fw in fibre] == ["split", "split"]
    # (1 + sqrt17)/2 * (1 - sqrt17)/2 = -4: the two 2-adic places see different valuations
    x = QFElement(Fraction(1, 2), Fraction(1, 2), F)
    vals = sorted(-abs_log(x, fw.place).finite_part.get(2, 0) for fw in fibre)
    assert vals == [0, 2]


@pytest.mark.parametrize("d, p, kind", [(2, 2, "ramified"), (5, 2, "inert"), (2, 3, "inert"),
                                        (5, 5, "ramified"), (3, 2, "ramified"), (2, 7, "split")])
def test_splitting_types(d, p, kind):
    fibre = extend_places(Place.finite(p), QuadField(d))
    assert {fw.place.splitting for fw in fibre} == {kind}
    assert sum(fw.weight for fw in fibre) == 1


def test_fibre_weights_sum_to_one_for_all_small_primes():
    F = QuadField(2)
    for p in primerange(2, 1000):
        fibre = extend_places(Place.finite(p), F)
        assert sum(fw.weight for fw in fibre) == 1
        assert sum(fw.place.local_degree for fw in fibre) == 2
    assert sum(fw.weight for fw in extend_places(Place.infinity(), F)) == 1


def test_imaginary_field_has_no_real_places():
    with pytest.raises(ComplexEmbedding):
        extend_places(Place.infinity(), QuadField(-1))


def test_fiber_average_examples():
    F = QuadField(2)
    fibre = [fw.place for fw in extend_places(Place.finite(7), F)]
    c = LogValue.log_prime(5, 3)
    assert fiber_average({w: c for w in fibre}, Place.finite(7), F) == c
    b = QFElement(1, 1, F)
    assert fiber_average(lambda w: abs_log(b, w), Place.finite(7), F).is_zero()
    (inert,) = [fw.place for fw in extend_places(Place.finite(3), F)]
    assert fiber_average({inert: c}, Place.finite(3), F) == c
    with pytest.raises(MissingFiberValue):
        fiber_average({fibre[0]: c}, Place.finite(7), F)


@pytest.mark.parametrize("b", [(1, 1), (2, 0), (3, 2)])
def test_norm_formula_examples(b):
    curve = AdelicCurve.quadratic(2)
    assert norm_formula_check(QFElement(*b, curve.field), curve).is_zero()


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5, 6, 7]).flatmap(qf_elements))
def test_norm_formula_fibre_by_fibre(b):
    """Each fibre alone satisfies [L:Q] * average of log|b| = log|N b|."""
    curve = AdelicCurve.quadratic(b.field.d)
    nb = b.norm()
    base = [Place.infinity()] + [Place.finite(p) for p in curve.support_primes([b])]
    for w in base:
        lifted = fiber_average(lambda nu: abs_log(b, nu), w, b.field) * 2
        assert lifted == abs_log(nb, w)
    assert norm_formula_check(b, curve).is_zero()
    assert pushforward_integral(b, curve).is_zero()


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 5, 13]).flatmap(qf_elements), st.fractions(min_value=Fraction(1, 5), max_value=1))
def test_pushforward_of_fibre_constant_function(b, kappa):
    curve = AdelicCurve.quadratic(b.field.d, kappa)
    nb = b.norm()
    for w in [Place.infinity()] + [Place.finite(p) for p in curve.support_primes([b])]:
        value = abs_log(nb, w)
        assert fiber_average(lambda nu: value, w, b.field) == value


def test_measure_and_weight():
    curve = AdelicCurve.quadratic(5, Fraction(1, 2))
    ramified = extend_places(Place.finite(5), curve.field)[0].place
    assert curve.measure(ramified) == Fraction(1, 2)
    split = extend_places(Place.finite(11), curve.field)[0].place
    assert curve.measure(split) == Fraction(1, 4)
    with pytest.raises(ValueError):
        AdelicCurve.rationals(Fraction(3, 2))
