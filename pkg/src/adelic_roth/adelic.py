"""Places, counting-measure adelic curves over Q and real quadratic fields.

Logarithms of absolute values are kept symbolic (:class:`LogValue`): a
rational combination of ``log p`` for primes p, plus a rational combination
of the archimedean "unit logs" ``log|(1 + t*sqrt(d)) / (1 - t*sqrt(d))|``,
plus a residual real interval.  With this representation the product
formula is an identity between exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple, Union

from sympy import factorint
from sympy.ntheory import sqrt_mod

from .errors import ComplexEmbedding, MissingFiberValue, ZeroElement
from .exact_core import (
    DEFAULT_WIDTH,
    QFElement,
    QuadField,
    RealInterval,
    as_rational,
    interval_log,
    qf_norm,
    refine_sign,
    sqrt_interval,
)

# ---------------------------------------------------------------------------
# factorisation helpers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=65536)
def _factor_int(n: int) -> Tuple[Tuple[int, int], ...]:
    n = abs(n)
    if n < 2:
        return ()
    return tuple(sorted(factorint(n).items()))


def factor_rational(r) -> Dict[int, int]:
    """Exponents of the primes in |r| (negative for the denominator)."""
    r = as_rational(r)
    if r == 0:
        raise ZeroElement("0 has no factorisation")
    out = dict(_factor_int(r.numerator))
    for p, e in _factor_int(r.denominator):
        out[p] = -e
    return out


def ord_p(r, p: int) -> int:
    r = as_rational(r)
    if r == 0:
        raise ZeroElement("ord of 0")
    v = 0
    num, den = r.numerator, r.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _clear_denominators(x: QFElement) -> Tuple[int, int, int]:
    c = math.lcm(x.a.denominator, x.b.denominator)
    return int(x.a * c), int(x.b * c), c


# ---------------------------------------------------------------------------
# symbolic logarithms
# ---------------------------------------------------------------------------


def _canon(mapping) -> Tuple:
    return tuple(sorted((k, v) for k, v in mapping.items() if v != 0))


@lru_cache(maxsize=4096)
def unit_log_interval(d: int, t: Fraction, width: Fraction) -> RealInterval:
    """Enclosure of ``log|(1 + t sqrt d) / (1 - t sqrt d)|`` for t > 0."""
    sw = width / (8 * t + 8)
    while True:
        s = sqrt_interval(d, sw)
        num = 1 + s * t
        den = 1 - s * t
        if den.sign() is None:
            sw = sw * sw if sw < 1 else sw / 4
            continue
        ratio = abs(num / den)
        enc = interval_log(ratio, width / 2)
        if enc.width <= width:
            return enc
        sw = sw * sw if sw < 1 else sw / 4


class LogValue:
    """An exact real number  sum c_p log p  +  sum c_u U(u)  +  interval.

    ``finite_part`` maps primes to rational coefficients of ``log p``.
    ``unit_part`` maps ``(d, t)`` with t > 0 to the coefficient of
    ``log|(1 + t sqrt d)/(1 - t sqrt d)|``.  ``arch_part`` is a residual
    enclosure for quantities with no symbolic form.
    """

    __slots__ = ("finite_part", "unit_part", "arch_part")

    def __init__(self, finite_part=None, unit_part=None, arch_part=None):
        self.finite_part: Dict[int, Fraction] = {
            int(p): as_rational(c) for p, c in (finite_part or {}).items() if c != 0}
        self.unit_part: Dict[Tuple[int, Fraction], Fraction] = {
            k: as_rational(c) for k, c in (unit_part or {}).items() if c != 0}
        self.arch_part: RealInterval = arch_part if arch_part is not None else RealInterval(0, 0)

    @classmethod
    def zero(cls) -> "LogValue":
        return cls()

    @classmethod
    def log_rational(cls, r) -> "LogValue":
        """log|r| for a nonzero rational r."""
        return cls({p: e for p, e in factor_rational(r).items()})

    @classmethod
    def log_prime(cls, p: int, coeff=1) -> "LogValue":
        return cls({p: as_rational(coeff)})

    @classmethod
    def from_interval(cls, enc: RealInterval) -> "LogValue":
        return cls(arch_part=enc)

    def is_symbolic(self) -> bool:
        return self.arch_part.is_exact() and self.arch_part.lo == 0

    def is_zero(self) -> bool:
        """Exact zero test; True only when every part vanishes symbolically."""
        return not self.finite_part and not self.unit_part and self.is_symbolic()

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if not isinstance(other, LogValue):
            return NotImplemented
        fp = dict(self.finite_part)
        for p, c in other.finite_part.items():
            fp[p] = fp.get(p, 0) + c
        up = dict(self.unit_part)
        for k, c in other.unit_part.items():
            up[k] = up.get(k, 0) + c
        return LogValue(fp, up, self.arch_part + other.arch_part)

    __radd__ = __add__

    def __neg__(self):
        return LogValue({p: -c for p, c in self.finite_part.items()},
                        {k: -c for k, c in self.unit_part.items()},
                        -self.arch_part)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        c = as_rational(c)
        if c == 0:
            return LogValue()
        return LogValue({p: v * c for p, v in self.finite_part.items()},
                        {k: v * c for k, v in self.unit_part.items()},
                        self.arch_part * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / as_rational(c))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self.is_zero()
        if not isinstance(other, LogValue):
            return NotImplemented
        return (_canon(self.finite_part) == _canon(other.finite_part)
                and _canon(self.unit_part) == _canon(other.unit_part)
                and self.arch_part == other.arch_part)

    def __hash__(self):
        return hash((_canon(self.finite_part), _canon(self.unit_part), self.arch_part))

    def interval(self, width=DEFAULT_WIDTH) -> RealInterval:
        """Enclosure of the value of width at most ``width`` plus the residual width."""
        width = as_rational(width)
        nterms = len(self.finite_part) + len(self.unit_part)
        total = self.arch_part
        if nterms == 0:
            return total
        scale = sum(abs(c) for c in self.finite_part.values()) + sum(
            abs(c) for c in self.unit_part.values())
        w = width / scale
        for p, c in self.finite_part.items():
            total = total + interval_log(p, w) * c
        for (d, t), c in self.unit_part.items():
            total = total + unit_log_interval(d, t, w) * c
        return total

    def sign(self, min_width=None) -> int:
        """Exact sign when symbolic zero, otherwise decided by refinement."""
        if self.is_zero():
            return 0
        if not self.finite_part and not self.unit_part:
            s = self.arch_part.sign()
            if s is None:
                from .errors import UndecidedComparison
                raise UndecidedComparison(f"residual interval {self.arch_part!r} straddles 0")
            return s
        if len(self.finite_part) == 1 and not self.unit_part and self.is_symbolic():
            (c,) = self.finite_part.values()
            return 1 if c > 0 else -1
        if min_width is None:
            return refine_sign(self.interval)
        return refine_sign(self.interval, min_width=min_width)

    def __float__(self):
        return float(self.interval(Fraction(1, 2**60)).mid)

    def __repr__(self):
        parts = [f"{c}*log({p})" for p, c in sorted(self.finite_part.items())]
        parts += [f"{c}*U(d={d},t={t})" for (d, t), c in sorted(self.unit_part.items())]
        if not self.is_symbolic():
            parts.append(repr(self.arch_part))
        return "LogValue(" + (" + ".join(parts) if parts else "0") + ")"


def log_plus(v: LogValue) -> LogValue:
    return v if v.sign() > 0 else LogValue()


def log_minus(v: LogValue) -> LogValue:
    return v if v.sign() < 0 else LogValue()


def log_max(values: Iterable[LogValue]) -> LogValue:
    best = None
    for v in values:
        if best is None or (v - best).sign() > 0:
            best = v
    if best is None:
        raise ValueError("max of an empty family")
    return best


# ---------------------------------------------------------------------------
# places
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Place:
    """One absolute value of Q or of Q(sqrt d).

    ``kind`` is ``"finite"`` or ``"archimedean"``.  A finite place records
    its prime and splitting type; a split place is pinned down by ``root``,
    an integer r with r^2 = d in Z_p (given mod p for odd p, mod 4 for p = 2).
    An archimedean place records its embedding: ``rational``, ``plus`` or
    ``minus``.  ``field_d`` is None for Q.
    """

    kind: str
    p: int = 0
    splitting: str = "rational"
    root: int = 0
    embedding: str = ""
    field_d: Optional[int] = None
    local_degree: int = 1

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls("finite", p=p, splitting="rational")

    @classmethod
    def infinity(cls) -> "Place":
        return cls("archimedean", embedding="rational")

    @property
    def is_archimedean(self) -> bool:
        return self.kind == "archimedean"

    @property
    def epsilon(self) -> Fraction:
        """Ostrowski exponent: 1 for the (real, standard) archimedean places, 0 otherwise."""
        return Fraction(1) if self.is_archimedean else Fraction(0)

    def __str__(self):
        base = "Q" if self.field_d is None else f"Q(sqrt({self.field_d}))"
        if self.is_archimedean:
            return f"{base}:inf" + ("" if self.embedding == "rational" else f"[{self.embedding}]")
        tag = "" if self.splitting == "rational" else f"[{self.splitting}"
        if self.splitting == "split":
            tag += f",r={self.root}"
        if tag:
            tag += "]"
        return f"{base}:p={self.p}{tag}"


@dataclass(frozen=True)
class FiberWeight:
    place: Place
    weight: Fraction


def _splitting_type(p: int, d: int) -> str:
    if p == 2:
        r = d % 8
        if r == 1:
            return "split"
        if r == 5:
            return "inert"
        return "ramified"
    if d % p == 0:
        return "ramified"
    return "split" if pow(d % p, (p - 1) // 2, p) == 1 else "inert"


def _split_roots(p: int, d: int) -> Tuple[int, int]:
    if p == 2:
        return (1, 3)
    roots = sorted(sqrt_mod(d % p, p, all_roots=True))
    return (roots[0], roots[1])


def extend_places(base_place: Place, L: QuadField) -> List[FiberWeight]:
    """Places of L over a place of Q, with the fibre probabilities [L_nu:Q_p]/[L:Q]."""
    if base_place.field_d is not None:
        raise ValueError("base place must be a place of Q")
    d = L.d
    if base_place.is_archimedean:
        if d < 0:
            raise ComplexEmbedding(f"{L} is imaginary; complex places are out of scope")
        half = Fraction(1, 2)
        return [FiberWeight(Place("archimedean", embedding=e, field_d=d), half)
                for e in ("plus", "minus")]
    p = base_place.p
    kind = _splitting_type(p, d)
    if kind == "split":
        return [FiberWeight(Place("finite", p=p, splitting="split", root=r, field_d=d), Fraction(1, 2))
                for r in _split_roots(p, d)]
    return [FiberWeight(Place("finite", p=p, splitting=kind, field_d=d, local_degree=2), Fraction(1))]


def _lift_root(p: int, d: int, root: int, k: int) -> int:
    """A p-adic square root of d, congruent to ``root``, known modulo p**k."""
    if p == 2:
        # r^2 = d mod 2^m determines r mod 2^(m-1); lift one bit at a time
        m, r = 3, root
        if (r * r - d) % 8:
            r = root + 4
        while m < k + 1:
            if (r * r - d) % (1 << (m + 1)):
                r += 1 << (m - 1)
            m += 1
        return r % (1 << k)
    r, mod = root % p, p
    while mod < p**k:
        mod = min(mod * mod, p**k)
        r = (r - (r * r - d) * pow(2 * r, -1, mod)) % mod
    return r


def _split_valuation(x: QFElement, place: Place) -> int:
    A, B, c = _clear_denominators(x)
    p, d = place.p, place.field_d
    n = A * A - d * B * B
    e = ord_p(n, p)
    k = e + 1
    r = _lift_root(p, d, place.root, k)
    v = (A + B * r) % p**k
    if v == 0:
        raise ArithmeticError("insufficient p-adic precision")  # cannot happen: v <= ord_p(N)
    return ord_p(v, p) - ord_p(c, p)


def abs_log(a, place: Place) -> LogValue:
    """log|a|_place as an exact :class:`LogValue`."""
    if isinstance(a, QFElement) and place.field_d is None:
        if not a.is_rational():
            raise ValueError("irrational element at a place of Q")
        a = a.a
    if isinstance(a, QFElement):
        if a.is_zero():
            raise ZeroElement("log|0| is undefined")
        if a.field.d != place.field_d:
            raise ValueError(f"element of {a.field} at place {place}")
        return _abs_log_quadratic(a, place)
    a = as_rational(a)
    if a == 0:
        raise ZeroElement("log|0| is undefined")
    if place.is_archimedean:
        return LogValue.log_rational(a)
    if place.field_d is None or place.splitting == "split":
        return LogValue.log_prime(place.p, -ord_p(a, place.p))
    # inert / ramified: |a|_nu = |N(a)|_p^(1/2) = |a|_p for rational a
    return LogValue.log_prime(place.p, -ord_p(a, place.p))


def _abs_log_quadratic(x: QFElement, place: Place) -> LogValue:
    if place.is_archimedean:
        norm = x.norm()
        half_norm = LogValue.log_rational(norm) * Fraction(1, 2)
        if x.a == 0 or x.b == 0:
            return half_norm
        # log|x_plus| = 1/2 log|N x| + 1/2 log|x_plus / x_minus|
        t = x.b / x.a
        sgn = 1 if place.embedding == "plus" else -1
        if t < 0:
            t, sgn = -t, -sgn
        return half_norm + LogValue(unit_part={(x.field.d, t): Fraction(sgn, 2)})
    if place.splitting == "split":
        return LogValue.log_prime(place.p, -_split_valuation(x, place))
    return LogValue.log_prime(place.p, Fraction(-ord_p(x.norm(), place.p), 2))


# ---------------------------------------------------------------------------
# adelic curves
# ---------------------------------------------------------------------------


def _primes_of(r) -> List[int]:
    return [p for p, _ in _factor_int(as_rational(r).numerator)] + [
        p for p, _ in _factor_int(as_rational(r).denominator)]


@dataclass(frozen=True)
class AdelicCurve:
    """Q or Q(sqrt d) with the counting measure scaled by ``weight``.

    A place nu over p carries mass  weight * [L_nu : Q_p] / [L : Q],
    the pullback of the counting measure on Q.
    """

    field: Optional[QuadField] = None
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "weight", as_rational(self.weight))
        if not 0 < self.weight <= 1:
            # heights are normalised so that h(2) <= log 2
            raise ValueError("measure weight must lie in (0, 1]")
        if self.field is not None and self.field.d < 0:
            raise ComplexEmbedding("only real quadratic fields are supported")

    @classmethod
    def rationals(cls, weight=1) -> "AdelicCurve":
        return cls(None, as_rational(weight))

    @classmethod
    def quadratic(cls, d: int, weight=1) -> "AdelicCurve":
        return cls(QuadField(d), as_rational(weight))

    @property
    def degree(self) -> int:
        return 1 if self.field is None else 2

    def measure(self, place: Place) -> Fraction:
        return self.weight * Fraction(place.local_degree, self.degree)

    def coerce(self, a):
        if self.field is None:
            if isinstance(a, QFElement):
                if not a.is_rational():
                    raise ValueError(f"{a} is not in Q")
                return a.a
            return as_rational(a)
        if isinstance(a, QFElement):
            if a.field != self.field:
                raise ValueError(f"{a} is not in {self.field}")
            return a
        return QFElement(as_rational(a), 0, self.field)

    def archimedean_places(self) -> List[Place]:
        if self.field is None:
            return [Place.infinity()]
        return [fw.place for fw in extend_places(Place.infinity(), self.field)]

    def places_above(self, p: int) -> List[Place]:
        if self.field is None:
            return [Place.finite(p)]
        return [fw.place for fw in extend_places(Place.finite(p), self.field)]

    def support_primes(self, elements: Iterable) -> List[int]:
        primes = set()
        for a in elements:
            a = self.coerce(a)
            if isinstance(a, QFElement):
                if a.is_zero():
                    continue
                A, B, c = _clear_denominators(a)
                primes.update(_primes_of(c))
                primes.update(_primes_of(A * A - a.field.d * B * B))
            elif a != 0:
                primes.update(_primes_of(a))
        return sorted(primes)

    def places_for(self, elements: Iterable) -> List[Place]:
        """Archimedean places plus every finite place where some element has |a| != 1."""
        out = list(self.archimedean_places())
        for p in self.support_primes(elements):
            out.extend(self.places_above(p))
        return out

    # the supplier named in the data model
    place_supplier = places_for

    def __str__(self):
        f = "Q" if self.field is None else str(self.field)
        return f if self.weight == 1 else f"{f} (weight {self.weight})"


def integrate(f: Callable[[Place], LogValue], places: Iterable[Place], curve: AdelicCurve) -> LogValue:
    """Counting-measure integral of ``f`` over a finite set of places."""
    total = LogValue()
    for w in places:
        total = total + f(w) * curve.measure(w)
    return total


def product_formula_defect(a, curve: AdelicCurve) -> LogValue:
    """The integral of log|a| over all places (zero on a proper curve)."""
    a = curve.coerce(a)
    if a == 0:
        raise ZeroElement("product formula needs a nonzero element")
    return integrate(lambda w: abs_log(a, w), curve.places_for([a]), curve)


def fiber_average(f: Union[Mapping[Place, LogValue], Callable[[Place], LogValue]],
                  base_place: Place, L: QuadField) -> LogValue:
    """Sum over nu above ``base_place`` of P(nu) * f(nu)."""
    total = LogValue()
    for fw in extend_places(base_place, L):
        if callable(f):
            value = f(fw.place)
        else:
            if fw.place not in f:
                raise MissingFiberValue(f"no value at {fw.place}")
            value = f[fw.place]
        total = total + value * fw.weight
    return total


def norm_formula_check(b, curve: AdelicCurve) -> LogValue:
    """[L:Q] * int log|b| d(eta)  -  int log|N(b)| d(mu); zero on every input.

    The left integral is taken fibre by fibre, so each base place contributes
    [L:Q] * sum_nu P(nu) log|b|_nu - log|N(b)|, which vanishes place by place.
    """
    if curve.field is None:
        raise ValueError("norm formula needs a quadratic curve")
    b = curve.coerce(b)
    if b.is_zero():
        raise ZeroElement("norm formula needs a nonzero element")
    base = AdelicCurve.rationals(curve.weight)
    nb = qf_norm(b)
    primes = curve.support_primes([b])
    base_places = [Place.infinity()] + [Place.finite(p) for p in primes]

    def local(w):
        lifted = fiber_average(lambda nu: abs_log(b, nu), w, curve.field) * curve.degree
        return lifted - abs_log(nb, w)

    return integrate(local, base_places, base)


def pushforward_integral(b, curve: AdelicCurve) -> LogValue:
    """Integral of log|b| over the L-places computed fibre by fibre on Q."""
    if curve.field is None:
        raise ValueError("pushforward needs a quadratic curve")
    b = curve.coerce(b)
    base = AdelicCurve.rationals(curve.weight)
    primes = curve.support_primes([b])
    base_places = [Place.infinity()] + [Place.finite(p) for p in primes]
    return integrate(lambda w: fiber_average(lambda nu: abs_log(b, nu), w, curve.field),
                     base_places, base)
