"""Sparse multivariate polynomials with exact coefficients."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, Sequence, Tuple

from .adelic import LogValue, Place, abs_log, log_max, log_plus
from .errors import ZeroPolynomial
from .exact_core import QFElement, as_rational

Exponent = Tuple[int, ...]


def _norm_coeff(c):
    if isinstance(c, QFElement):
        return c.a if c.b == 0 else c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int) and not isinstance(c, bool):
        return c
    return as_rational(c)


def _cdiv(a, b):
    if isinstance(a, int) and isinstance(b, int) and a % b == 0:
        return a // b
    if isinstance(a, QFElement) or isinstance(b, QFElement):
        return _norm_coeff(a / b if isinstance(a, QFElement) else b.__rtruediv__(a))
    return _norm_coeff(Fraction(a) / b)


def _pow(x, e: int):
    if e == 0:
        return 1
    return x**e


class MvPoly:
    """A polynomial in ``nvars`` variables stored as {exponent tuple: coefficient}."""

    __slots__ = ("nvars", "terms")

    def __init__(self, terms: Dict[Exponent, object] = None, nvars: int = 1):
        self.nvars = nvars
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} does not have {nvars} entries")
            if c != 0:
                clean[e] = _norm_coeff(c)
        self.terms: Dict[Exponent, object] = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, c, nvars: int) -> "MvPoly":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def variable(cls, j: int, nvars: int) -> "MvPoly":
        e = [0] * nvars
        e[j] = 1
        return cls({tuple(e): 1}, nvars)

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "MvPoly":
        return cls({tuple(exps): c}, len(exps))

    @classmethod
    def _raw(cls, terms, nvars):
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def coefficients(self):
        return list(self.terms.values())

    def degree(self, j: int) -> int:
        return max((e[j] for e in self.terms), default=0)

    def degrees(self) -> Tuple[int, ...]:
        return tuple(self.degree(j) for j in range(self.nvars))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __len__(self):
        return len(self.terms)

    # -- arithmetic --------------------------------------------------------

    def _lift(self, other) -> "MvPoly":
        if isinstance(other, MvPoly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials in different numbers of variables")
            return other
        return MvPoly.constant(other, self.nvars)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v == 0:
                out.pop(e, None)
            else:
                out[e] = _norm_coeff(v)
        return MvPoly._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return MvPoly._raw({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, MvPoly):
            if other == 0:
                return MvPoly({}, self.nvars)
            return MvPoly._raw({e: _norm_coeff(c * other) for e, c in self.terms.items()}, self.nvars)
        other = self._lift(other)
        out: Dict[Exponent, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MvPoly(out, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = MvPoly.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def exact_div(self, other) -> "MvPoly":
        """Quotient of an exact division; raises ArithmeticError on a remainder."""
        if not isinstance(other, MvPoly):
            return MvPoly._raw({e: _cdiv(c, other) for e, c in self.terms.items()}, self.nvars)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if len(other.terms) == 1:
            (ed, cd), = other.terms.items()
            out = {}
            for e, c in self.terms.items():
                q = tuple(a - b for a, b in zip(e, ed))
                if min(q) < 0:
                    raise ArithmeticError("division is not exact")
                out[q] = _cdiv(c, cd)
            return MvPoly._raw(out, self.nvars)
        # lexicographic division, leading terms tracked with a heap
        lead = max(other.terms)
        lc = other.terms[lead]
        rest = [(e, c) for e, c in other.terms.items() if e != lead]
        rem = dict(self.terms)
        heap = [tuple(-x for x in e) for e in rem]
        heapq.heapify(heap)
        quot = {}
        while rem:
            top = tuple(-x for x in heapq.heappop(heap))
            c = rem.pop(top, 0)
            if c == 0:
                continue
            q = tuple(a - b for a, b in zip(top, lead))
            if min(q) < 0:
                raise ArithmeticError("division is not exact")
            qc = _cdiv(c, lc)
            quot[q] = qc
            for e, cd in rest:
                key = tuple(a + b for a, b in zip(q, e))
                if key in rem:
                    v = rem[key] - qc * cd
                    if v == 0:
                        del rem[key]
                    else:
                        rem[key] = v
                else:
                    rem[key] = -qc * cd
                    heapq.heappush(heap, tuple(-x for x in key))
        return MvPoly._raw(quot, self.nvars)

    # -- evaluation and calculus -------------------------------------------

    def evaluate(self, point: Sequence):
        if len(point) != self.nvars:
            raise ValueError("point has the wrong dimension")
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * _pow(x, k)
            total = total + term
        return _norm_coeff(total) if not isinstance(total, MvPoly) else total

    __call__ = evaluate

    def delta_derivative(self, i: Sequence[int]) -> "MvPoly":
        """(1/i!) d^i P: X^a maps to C(a, i) X^(a - i)."""
        i = tuple(i)
        out = {}
        for e, c in self.terms.items():
            if all(a >= k for a, k in zip(e, i)):
                binom = math.prod(math.comb(a, k) for a, k in zip(e, i))
                out[tuple(a - k for a, k in zip(e, i))] = _norm_coeff(c * binom)
        return MvPoly._raw(out, self.nvars)

    def translate(self, alpha: Sequence) -> "MvPoly":
        """The polynomial X -> P(X + alpha), one variable at a time."""
        if len(alpha) != self.nvars:
            raise ValueError("shift has the wrong dimension")
        terms = dict(self.terms)
        for j, aj in enumerate(alpha):
            if aj == 0:
                continue
            out: Dict[Exponent, object] = {}
            for e, c in terms.items():
                n = e[j]
                for k in range(n + 1):
                    key = e[:j] + (k,) + e[j + 1:]
                    out[key] = out.get(key, 0) + c * math.comb(n, k) * _pow(aj, n - k)
            terms = {e: _norm_coeff(c) for e, c in out.items() if c != 0}
        return MvPoly._raw(terms, self.nvars)

    # -- misc --------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, MvPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        return self.is_constant() and self.constant_term() == other

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"MvPoly({self.terms!r}, nvars={self.nvars})"

    def __str__(self):
        if not self.terms:
            return "0"
        names = ["X"] if self.nvars == 1 else [f"X{j + 1}" for j in range(self.nvars)]
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            cs = str(c)
            if isinstance(c, QFElement):
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def delta_derivative(P: MvPoly, i: Sequence[int]) -> MvPoly:
    return P.delta_derivative(i)


def translate(P: MvPoly, alpha: Sequence) -> MvPoly:
    return P.translate(alpha)


def d_index(P: MvPoly, alpha: Sequence, d: Sequence) -> Fraction:
    """min sum_j i_j/d_j over the i with Delta^i P(alpha) != 0.

    The values Delta^i P(alpha) are the coefficients of P(X + alpha), so
    one translation produces all of them at once.
    """
    if P.is_zero():
        raise ZeroPolynomial("the index of the zero polynomial is undefined")
    d = [as_rational(x) for x in d]
    shifted = P.translate(alpha)
    return min(sum((Fraction(k) / dj for k, dj in zip(e, d)), Fraction(0)) for e in shifted.terms)


@dataclass
class DerivativeHeightCheck:
    lhs: LogValue
    rhs: LogValue
    holds: bool


def derivative_height_check(P: MvPoly, alpha: Sequence, place: Place) -> DerivativeHeightCheck:
    """Compare max_i log|Delta^i P(alpha)| with the local bound through h(P) and the degrees."""
    from .heights import local_height_poly

    if P.is_zero():
        raise ZeroPolynomial("the zero polynomial has no local height")
    lhs = log_max(abs_log(c, place) for c in P.translate(alpha).coefficients())
    rhs = local_height_poly(P, place)
    two = log_plus(abs_log(2, place))
    for j, deg in enumerate(P.degrees()):
        rhs = rhs + LogValue.log_rational(1 + deg)
        a = alpha[j]
        a_plus = LogValue() if a == 0 else log_plus(abs_log(a, place))
        rhs = rhs + (two + a_plus) * deg
    return DerivativeHeightCheck(lhs, rhs, (rhs - lhs).sign() >= 0)
