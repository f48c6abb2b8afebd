"""Heights of field elements and polynomials, and the inequalities around them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .adelic import (
    AdelicCurve,
    LogValue,
    Place,
    abs_log,
    integrate,
    log_max,
    log_minus,
    log_plus,
)
from .continued_fractions import pell_power
from .errors import (
    InvalidPropertyIndex,
    ZeroElement,
    ZeroHeight,
    ZeroPolynomial,
)
from .exact_core import DEFAULT_WIDTH, RealInterval, as_rational, interval_log, sqrt_interval


def epsilon(place: Place) -> Fraction:
    """log+|2| / log 2 at ``place``."""
    v = log_plus(abs_log(2, place))
    if v.is_zero():
        return Fraction(0)
    return v.finite_part[2]


# ---------------------------------------------------------------------------
# heights of elements
# ---------------------------------------------------------------------------


@dataclass
class HeightReport:
    element: object
    h: RealInterval
    h_exact: LogValue
    per_place: List[Tuple[Place, LogValue]]


def height_report(a, curve: AdelicCurve, width=DEFAULT_WIDTH) -> HeightReport:
    a = curve.coerce(a)
    if a == 0:
        raise ZeroElement("the height of 0 is undefined")
    per_place = [(w, log_plus(abs_log(a, w))) for w in curve.places_for([a])]
    total = LogValue()
    for w, v in per_place:
        total = total + v * curve.measure(w)
    return HeightReport(a, total.interval(width), total, per_place)


def height_logvalue(a, curve: AdelicCurve) -> LogValue:
    """Exact height, integral of log+|a| over the places of ``curve``."""
    a = curve.coerce(a)
    if a == 0:
        raise ZeroElement("the height of 0 is undefined")
    return integrate(lambda w: log_plus(abs_log(a, w)), curve.places_for([a]), curve)


def height(a, curve: AdelicCurve, width=DEFAULT_WIDTH) -> RealInterval:
    return height_logvalue(a, curve).interval(width)


def _height_or_zero(a, curve):
    # h(0) := 0, needed when a sum of elements cancels
    a = curve.coerce(a)
    return LogValue() if a == 0 else height_logvalue(a, curve)


# ---------------------------------------------------------------------------
# heights of polynomials
# ---------------------------------------------------------------------------


def local_height_poly(P, place: Place) -> LogValue:
    """log of the largest coefficient absolute value at ``place``."""
    coeffs = [c for c in P.coefficients() if c != 0]
    if not coeffs:
        raise ZeroPolynomial("the height of the zero polynomial is undefined")
    return log_max(abs_log(c, place) for c in coeffs)


def height_poly_logvalue(P, curve: AdelicCurve) -> LogValue:
    coeffs = [curve.coerce(c) for c in P.coefficients() if c != 0]
    if not coeffs:
        raise ZeroPolynomial("the height of the zero polynomial is undefined")
    return integrate(lambda w: local_height_poly(P, w), curve.places_for(coeffs), curve)


def height_poly(P, curve: AdelicCurve, width=DEFAULT_WIDTH) -> RealInterval:
    """Height of P as an enclosure.

    Over Q no factorisation is needed: writing P = (g/L) P0 with P0 a
    primitive integer polynomial, the finite places contribute log(L/g) and
    the archimedean place log max|c|, so h(P) = log max |coefficients of P0|.
    """
    if curve.field is None:
        coeffs = [as_rational(c) for c in P.coefficients() if c != 0]
        if not coeffs:
            raise ZeroPolynomial("the height of the zero polynomial is undefined")
        L = math.lcm(*(c.denominator for c in coeffs))
        g = math.gcd(*(c.numerator for c in coeffs))
        top = max(abs(c) for c in coeffs) * L / g
        return interval_log(top, as_rational(width) / curve.weight) * curve.weight
    return height_poly_logvalue(P, curve).interval(width)


# ---------------------------------------------------------------------------
# the inequality suite
# ---------------------------------------------------------------------------


@dataclass
class PropertyResult:
    k: int
    holds: bool
    margin: RealInterval
    margin_exact: LogValue


def _integral_over(S: Sequence[Place], f, curve: AdelicCurve) -> LogValue:
    return integrate(f, S, curve)


def _margin_of(k: int, inputs, S, curve) -> LogValue:
    h = lambda x: height_logvalue(x, curve)
    if k == 1:
        (a,) = inputs
        a = curve.coerce(a)
        return h(a) - h(1 / a)
    if k == 2:
        (a,) = inputs
        a = curve.coerce(a)
        integral = _integral_over(S, lambda w: abs_log(a, w), curve)
        upper = h(a) - integral
        lower = integral + h(a)
        return upper if (upper - lower).sign() <= 0 else lower
    if k == 3:
        (a,) = inputs
        a = curve.coerce(a)
        return _integral_over(S, lambda w: log_minus(abs_log(a, w)), curve) + h(a) * 2
    if k == 4:
        xs = [curve.coerce(x) for x in inputs]
        if not xs:
            raise ValueError("property 4 needs at least one summand")
        total = xs[0]
        for x in xs[1:]:
            total = total + x
        bound = h(len(xs)) + sum((_height_or_zero(x, curve) for x in xs), LogValue())
        return bound - _height_or_zero(total, curve)
    if k in (5, 6):
        a, b = (curve.coerce(x) for x in inputs)
        diff = a - b
        if diff == 0:
            raise ZeroElement("properties 5 and 6 need a != b")
        if k == 5:
            integral = _integral_over(S, lambda w: abs_log(diff, w), curve)
            return integral + LogValue.log_prime(2) + _height_or_zero(a, curve) + _height_or_zero(b, curve)
        integral = _integral_over(S, lambda w: log_minus(abs_log(diff, w)), curve)
        return (integral + LogValue.log_prime(2, 2)
                + _height_or_zero(a, curve) * 2 + _height_or_zero(b, curve) * 2)
    raise InvalidPropertyIndex(f"height property index must be 1..6, got {k}")


def check_height_property(k: int, inputs, S: Sequence[Place], curve: AdelicCurve,
                          width=DEFAULT_WIDTH) -> PropertyResult:
    """Evaluate one of the six height inequalities and return its slack.

    Inputs are ``(a,)`` for k = 1, 2, 3, ``(a_1, ..., a_m)`` for k = 4 and
    ``(a, b)`` for k = 5, 6.  The slack is right side minus left side of
    the inequality written as ``lhs <= rhs``, so ``holds`` means slack >= 0
    (exact equality for k = 1).
    """
    if k not in range(1, 7):
        raise InvalidPropertyIndex(f"height property index must be 1..6, got {k}")
    margin = _margin_of(k, inputs, S, curve)
    holds = margin.is_zero() if k == 1 else margin.sign() >= 0
    return PropertyResult(k, holds, margin.interval(width), margin)


# ---------------------------------------------------------------------------
# Northcott
# ---------------------------------------------------------------------------


def _max_naive_bound(C: LogValue) -> int:
    """Largest integer M >= 0 with log M <= C (M = 0 when C < 0)."""
    if C.sign() < 0:
        return 0
    guess = max(1, int(math.exp(min(float(C), 700.0))))
    fits = lambda m: (C - LogValue.log_rational(m)).sign() >= 0
    while guess > 1 and not fits(guess):
        guess -= 1
    while fits(guess + 1):
        guess += 1
    return guess


def northcott_enumerate(C: Union[Fraction, int, str, LogValue], curve: Optional[AdelicCurve] = None
                        ) -> List[Fraction]:
    """All rationals of height at most ``C`` on a curve over Q, in increasing order."""
    curve = curve or AdelicCurve.rationals()
    if curve.field is not None:
        raise ValueError("enumeration is implemented over Q only")
    if not isinstance(C, LogValue):
        C = LogValue.from_interval(RealInterval.exact(as_rational(C)))
    M = _max_naive_bound(C / curve.weight)
    out = []
    for p in range(1, M + 1):
        for q in range(1, M + 1):
            if math.gcd(p, q) == 1:
                out.append(Fraction(p, q))
                out.append(Fraction(-p, q))
    return sorted(out)


# ---------------------------------------------------------------------------
# equicontinuity and uniform integrability
# ---------------------------------------------------------------------------


@dataclass
class EquicontinuityGapRecord:
    p: int
    k: int
    pell_solution: Tuple[int, int]
    gap: RealInterval


def equicontinuity_gap(p: int, k: int, width=DEFAULT_WIDTH) -> EquicontinuityGapRecord:
    """Gap between the two real places on the k-th Pell unit of Q(sqrt p).

    The unit u = a + b sqrt p has |u| > 1 at one embedding and |u| < 1 at
    the other, so the log- values differ by -ln(a - b sqrt p) = ln(a + b sqrt p).
    """
    a, b = pell_power(p, k)
    width = as_rational(width)
    # ln(a + b sqrt p), with sqrt(p b^2) enclosed tightly enough for the requested width
    x = a + sqrt_interval(p * b * b, width / 4)
    return EquicontinuityGapRecord(p, k, (a, b), interval_log(x, width / 2))


def uniform_integrability_probe(beta, eps, curve: AdelicCurve) -> Fraction:
    """Measure threshold below which every archimedean set keeps  -int log-|beta| < eps h(beta).

    All subsets of the archimedean places are enumerated.  The result is the
    smallest measure of a failing subset; when no subset fails, the total
    archimedean measure plus the weight.
    """
    beta = curve.coerce(beta)
    eps = as_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if beta == 0:
        raise ZeroElement("beta must be nonzero")
    hb = height_logvalue(beta, curve)
    if hb.is_zero():
        raise ZeroHeight(f"h({beta}) = 0")
    arch = curve.archimedean_places()
    minus = {w: -log_minus(abs_log(beta, w)) for w in arch}
    total = sum((curve.measure(w) for w in arch), Fraction(0))
    best = total + curve.weight
    for r in range(len(arch) + 1):
        for T in itertools.combinations(arch, r):
            mass = sum((curve.measure(w) for w in T), Fraction(0))
            integral = sum((minus[w] * curve.measure(w) for w in T), LogValue())
            if (hb * eps - integral).sign() <= 0:
                best = min(best, mass)
    return best
