"""Continued fractions of real quadratic irrationals, with exact integers."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, List, Tuple

from .errors import NonQuadraticAlpha, SquareInput
from .exact_core import QFElement, as_rational


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def quadratic_partial_quotients(P: int, Q: int, D: int) -> Iterator[int]:
    """Partial quotients of (P + sqrt D) / Q.

    Requires D > 0 non-square, Q != 0 and Q | D - P^2 (any quadratic
    irrational can be brought to this shape, see :func:`normalize`).
    """
    if _is_square(D):
        raise NonQuadraticAlpha(f"sqrt({D}) is rational")
    if Q == 0 or (D - P * P) % Q:
        raise ValueError("need Q | D - P^2")
    r = math.isqrt(D)
    while True:
        # floor((P + sqrt D) / Q) computed exactly
        if Q > 0:
            a = (P + r) // Q
        else:
            a = (P + r + 1) // Q
        yield a
        P = a * Q - P
        Q = (D - P * P) // Q


def normalize(x: QFElement) -> Tuple[int, int, int]:
    """Write x = a + b sqrt d as (P + sqrt D) / Q with Q | D - P^2."""
    if x.b == 0:
        raise NonQuadraticAlpha(f"{x} is rational")
    # x = (a*c + sign(b) sqrt(b^2 c^2 d)) / c with c a common denominator
    c = math.lcm(x.a.denominator, x.b.denominator)
    P = int(x.a * c)
    D = int(x.b * x.b * c * c) * x.field.d
    Q = c
    if x.b < 0:
        P, Q = -P, -Q
    if (D - P * P) % Q:
        P, Q, D = P * abs(Q), Q * abs(Q), D * Q * Q
    return P, Q, D


def partial_quotients(alpha, count: int) -> List[int]:
    """First ``count`` partial quotients of a real quadratic irrational."""
    if not isinstance(alpha, QFElement):
        as_rational(alpha)
        raise NonQuadraticAlpha(f"{alpha} is rational")
    if alpha.field.d < 0:
        raise NonQuadraticAlpha("imaginary quadratic number")
    gen = quadratic_partial_quotients(*normalize(alpha))
    return [next(gen) for _ in range(count)]


def convergents(quotients) -> Iterator[Fraction]:
    p0, q0, p1, q1 = 1, 0, 0, 1
    for a in quotients:
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        yield Fraction(p0, q0)


def pell_fundamental(D: int) -> Tuple[int, int]:
    """Smallest (a, b) with a, b > 0 and a^2 - D b^2 = 1."""
    if D <= 0 or _is_square(D):
        raise SquareInput(f"{D} is a square (or not positive); the Pell equation is trivial")
    gen = quadratic_partial_quotients(0, 1, D)
    for frac in convergents(gen):
        a, b = frac.numerator, frac.denominator
        if a * a - D * b * b == 1:
            return a, b
    raise AssertionError("unreachable")


def pell_power(D: int, k: int) -> Tuple[int, int]:
    """(a, b) with a + b sqrt D = (fundamental solution)^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a1, b1 = pell_fundamental(D)
    a, b = a1, b1
    for _ in range(k - 1):
        a, b = a * a1 + D * b * b1, a * b1 + b * a1
    return a, b
