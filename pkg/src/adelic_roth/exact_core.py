"""Exact rationals, rational-endpoint real intervals and real quadratic fields.

Rationals are :class:`fractions.Fraction`.  Every real (archimedean)
quantity is carried as a :class:`RealInterval` whose endpoints are exact
rationals, so all comparisons stay sound: they are three-valued and the
caller narrows the width until the answer is decided.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from mpmath.libmp import (
    from_rational,
    mpf_log,
    round_ceiling,
    round_floor,
    to_rational,
)

from .errors import ComplexEmbedding, NonPositiveInput, UndecidedComparison

Rational = Fraction

#: default archimedean width, a dyadic rational
DEFAULT_WIDTH = Fraction(1, 2**64)
#: refinement stops once the working width drops below this
MIN_WIDTH = Fraction(1, 2**512)
#: square-freeness is certified by trial division; larger |d| is rejected
SQUAREFREE_BOUND = 10**12


def as_rational(x) -> Fraction:
    """Coerce ``int``, ``Fraction`` or a string such as ``"-3/7"`` to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if hasattr(x, "__index__"):
        # integer types from gmpy2 / numpy
        return Fraction(x.__index__())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class RealInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x) -> "RealInterval":
        x = as_rational(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, RealInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, float):
            x = Fraction(x)
        return self.lo <= x <= self.hi

    def sign(self) -> Optional[int]:
        """+1, -1 or 0 when decided by the enclosure, ``None`` when it straddles 0."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def __add__(self, other):
        if isinstance(other, RealInterval):
            return RealInterval(self.lo + other.lo, self.hi + other.hi)
        other = as_rational(other)
        return RealInterval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __neg__(self):
        return RealInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RealInterval):
            prods = (self.lo * other.lo, self.lo * other.hi,
                     self.hi * other.lo, self.hi * other.hi)
            return RealInterval(min(prods), max(prods))
        c = as_rational(other)
        if c >= 0:
            return RealInterval(self.lo * c, self.hi * c)
        return RealInterval(self.hi * c, self.lo * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RealInterval):
            if other.lo <= 0 <= other.hi:
                raise ZeroDivisionError("interval divisor contains 0")
            return self * RealInterval(1 / other.hi, 1 / other.lo)
        return self * (1 / as_rational(other))

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RealInterval(0, max(-self.lo, self.hi))

    def hull(self, other: "RealInterval") -> "RealInterval":
        return RealInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"RealInterval([{float(self.lo):.17g}, {float(self.hi):.17g}])"


def _bits_for(width: Fraction) -> int:
    # smallest k with 2**-k <= width
    if width <= 0:
        raise ValueError("width must be positive")
    k = max(0, math.ceil(math.log2(width.denominator)) - math.floor(math.log2(width.numerator)))
    while Fraction(1, 2**k) > width:
        k += 1
    return k


def _mpf_to_fraction(x) -> Fraction:
    p, q = to_rational(x)
    return Fraction(int(p), int(q))


def _log_bounds(x: Fraction, prec: int):
    lo = from_rational(x.numerator, x.denominator, prec, round_floor)
    hi = from_rational(x.numerator, x.denominator, prec, round_ceiling)
    return (_mpf_to_fraction(mpf_log(lo, prec, round_floor)),
            _mpf_to_fraction(mpf_log(hi, prec, round_ceiling)))


@lru_cache(maxsize=4096)
def _log_rational(x: Fraction, width: Fraction) -> RealInterval:
    if x == 1:
        return RealInterval(0, 0)
    # |ln x| is roughly the bit-length difference; add it to the working precision
    magnitude = abs(x.numerator.bit_length() - x.denominator.bit_length()) + 2
    prec = _bits_for(width) + magnitude.bit_length() + 16
    while True:
        lo, hi = _log_bounds(x, prec)
        if hi - lo <= width:
            return RealInterval(lo, hi)
        prec *= 2


def interval_log(x, width=DEFAULT_WIDTH) -> RealInterval:
    """Enclosure of ``ln x`` with rational endpoints.

    For a rational ``x`` the result has width at most ``width``.  For an
    interval input each endpoint is evaluated to within ``width`` and the
    result is the hull, so its width is ``ln(hi/lo)`` plus at most ``width``.
    """
    width = as_rational(width)
    if width <= 0:
        raise ValueError("width must be positive")
    if isinstance(x, RealInterval):
        if x.lo <= 0:
            raise NonPositiveInput(f"interval {x!r} is not strictly positive")
        if x.is_exact():
            return _log_rational(x.lo, width)
        return RealInterval(_log_rational(x.lo, width / 2).lo,
                            _log_rational(x.hi, width / 2).hi)
    x = as_rational(x)
    if x <= 0:
        raise NonPositiveInput(f"log of non-positive value {x}")
    return _log_rational(x, width)


def sqrt_interval(n, width=DEFAULT_WIDTH) -> RealInterval:
    """Enclosure of ``sqrt(n)`` for a non-negative rational ``n``."""
    n = as_rational(n)
    if n < 0:
        raise NonPositiveInput("sqrt of a negative number")
    p, q = n.numerator, n.denominator
    # sqrt(p/q) = sqrt(p*q)/q
    m = p * q
    r = math.isqrt(m)
    if r * r == m:
        return RealInterval.exact(Fraction(r, q))
    k = _bits_for(as_rational(width) * q)
    s = math.isqrt(m << (2 * k))
    return RealInterval(Fraction(s, q << k), Fraction(s + 1, q << k))


def is_squarefree(d: int, bound: int = SQUAREFREE_BOUND) -> bool:
    d = abs(d)
    if d > bound:
        raise ValueError(f"|d| = {d} exceeds the square-freeness check bound {bound}")
    if d == 0:
        return False
    if d % 4 == 0:
        return False
    p = 3
    while p * p <= d:
        if d % (p * p) == 0:
            return False
        p += 2
    return True


@dataclass(frozen=True)
class QuadField:
    """The field Q(sqrt(d)) for a square-free integer d != 0, 1."""

    d: int

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d in (0, 1):
            raise ValueError(f"invalid quadratic field parameter {self.d!r}")
        if not is_squarefree(self.d):
            raise ValueError(f"{self.d} is not square-free")

    @property
    def degree(self) -> int:
        return 2

    @property
    def discriminant(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def is_real(self) -> bool:
        return self.d > 0

    def element(self, a=0, b=0) -> "QFElement":
        return QFElement(as_rational(a), as_rational(b), self)

    @property
    def sqrt(self) -> "QFElement":
        return QFElement(Fraction(0), Fraction(1), self)

    def __str__(self):
        return f"Q(sqrt({self.d}))"


class QFElement:
    """a + b*sqrt(d) with rational a, b."""

    __slots__ = ("a", "b", "field")

    def __init__(self, a, b, field: QuadField):
        self.a = as_rational(a)
        self.b = as_rational(b)
        self.field = field

    def _coerce(self, other) -> "QFElement":
        if isinstance(other, QFElement):
            if other.field != self.field:
                raise ValueError(f"mixing elements of {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QFElement(other, 0, self.field)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QFElement(self.a + o.a, self.b + o.b, self.field)

    __radd__ = __add__

    def __neg__(self):
        return QFElement(-self.a, -self.b, self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QFElement(self.a - o.a, self.b - o.b, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self.field.d
        return QFElement(self.a * o.a + d * self.b * o.b,
                         self.a * o.b + self.b * o.a, self.field)

    __rmul__ = __mul__

    def conjugate(self) -> "QFElement":
        return QFElement(self.a, -self.b, self.field)

    def norm(self) -> Fraction:
        return self.a * self.a - self.field.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def inverse(self) -> "QFElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QFElement(self.a / n, -self.b / n, self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = QFElement(1, 0, self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_rational(self) -> bool:
        return self.b == 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, QFElement):
            return self.field == other.field and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.field.d))

    def __repr__(self):
        return f"QFElement({self.a}, {self.b}, d={self.field.d})"

    def __str__(self):
        return format_element(self)


FieldElement = Union[Fraction, int, QFElement]


def qf_norm(x) -> Fraction:
    """Norm down to Q: a^2 - d*b^2 (the square of the value for rationals)."""
    if isinstance(x, QFElement):
        return x.norm()
    x = as_rational(x)
    return x * x


def qf_embed(x: QFElement, which: str = "plus", width=DEFAULT_WIDTH) -> RealInterval:
    """Enclosure of the real embedding a + b*sqrt(d) (``plus``) or a - b*sqrt(d) (``minus``)."""
    if which not in ("plus", "minus"):
        raise ValueError(f"embedding must be 'plus' or 'minus', got {which!r}")
    if not isinstance(x, QFElement):
        return RealInterval.exact(as_rational(x))
    if x.field.d < 0:
        raise ComplexEmbedding(f"{x.field} has no real embeddings")
    b = x.b if which == "plus" else -x.b
    if b == 0:
        return RealInterval.exact(x.a)
    s = sqrt_interval(x.field.d, as_rational(width) / abs(b))
    return x.a + s * b


def refine_sign(evaluate, start_width=Fraction(1, 2**20), min_width=MIN_WIDTH) -> int:
    """Decide the sign of a real number given ``evaluate(width) -> RealInterval``.

    Halves the exponent of the width until the enclosure excludes zero; an
    interval that keeps straddling zero down to ``min_width`` raises
    :class:`UndecidedComparison`.
    """
    width = as_rational(start_width)
    while True:
        enc = evaluate(width)
        s = enc.sign()
        if s is not None:
            return s
        if width < min_width:
            raise UndecidedComparison(f"sign undecided at width {float(width):.3g}: {enc!r}")
        width = width * width if width < 1 else width / 2


_ELEMENT_RE = re.compile(
    r"""^\s*
    (?:(?P<a>[+-]?\d+(?:/\d+)?)\s*)?
    (?:(?P<sign>[+-])?\s*(?P<b>\d+(?:/\d+)?)?\s*\*?\s*(?:sqrt\(\s*(?P<d1>-?\d+)\s*\)|√\s*(?P<d2>-?\d+)))?
    \s*$""",
    re.VERBOSE,
)


def parse_element(text: str, field: Optional[QuadField] = None):
    """Parse ``"3+2*sqrt(2)"``, ``"3+2√2"``, ``"(1+sqrt(5))/2"``, ``"-7/3"``.

    Returns a Fraction when there is no square-root part, else a QFElement.
    A ``field`` argument fixes the field and rejects a conflicting radicand.
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty element")
    divisor = Fraction(1)
    m = re.match(r"^\((.*)\)/(\d+(?:/\d+)?)$", s)
    if m:
        s, divisor = m.group(1), Fraction(m.group(2))
        if divisor == 0:
            raise ValueError("division by zero")
    m = _ELEMENT_RE.match(s)
    if not m or (m.group("a") is None and m.group("d1") is None and m.group("d2") is None):
        raise ValueError(f"cannot parse field element {text!r}")
    a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
    radicand = m.group("d1") or m.group("d2")
    if radicand is None:
        if m.group("b") or m.group("sign"):
            raise ValueError(f"cannot parse field element {text!r}")
        value = a / divisor
        return value if field is None else QFElement(value, 0, field)
    if m.group("a") and not m.group("sign"):
        raise ValueError(f"cannot parse field element {text!r}")
    b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
    if m.group("sign") == "-":
        b = -b
    d = int(radicand)
    if field is None:
        field = QuadField(d)
    elif field.d != d:
        raise ValueError(f"radicand {d} does not match field {field}")
    return QFElement(a / divisor, b / divisor, field)


def format_element(x) -> str:
    if isinstance(x, QFElement):
        if x.b == 0:
            return str(x.a)
        parts = [] if x.a == 0 else [str(x.a)]
        b = x.b
        sign = "-" if b < 0 else ("+" if parts else "")
        mag = abs(b)
        coef = "" if mag == 1 else f"{mag}*"
        parts.append(f"{sign}{coef}sqrt({x.field.d})")
        return "".join(parts)
    return str(as_rational(x))
