"""Weighted multi-index sets and the volume of the truncated unit cube.

The set of multi-indices ``i`` with ``i_j <= d_j`` and ``sum i_j/d_j <= t``
is the lattice model of the region ``{x in [0,1]^N : sum x_j <= t}``,
whose volume is the Irwin-Hall distribution function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple

from .errors import OutOfRange
from .exact_core import as_rational

MultiIndex = Tuple[int, ...]

SOLVE_TOL = Fraction(1, 2**40)


def _check_d(d) -> Tuple[Fraction, ...]:
    d = tuple(as_rational(x) for x in d)
    if not d:
        raise ValueError("need at least one variable")
    if any(x <= 0 for x in d):
        raise ValueError("all d_j must be positive")
    return d


def enumerate_Gt(d: Sequence, t) -> List[MultiIndex]:
    """Multi-indices with i_j <= d_j and sum i_j/d_j <= t, in lexicographic order."""
    d = _check_d(d)
    t = as_rational(t)
    out: List[MultiIndex] = []
    bounds = [math.floor(x) for x in d]

    def rec(prefix, used):
        j = len(prefix)
        if j == len(d):
            out.append(tuple(prefix))
            return
        for i in range(bounds[j] + 1):
            w = used + Fraction(i) / d[j]
            if w > t:
                break
            prefix.append(i)
            rec(prefix, w)
            prefix.pop()

    if t >= 0:
        rec([], Fraction(0))
    return out


def count_Gt(d: Sequence, t) -> int:
    """|G_t| by a recursion over the last coordinate; independent of the enumeration."""
    d = _check_d(d)
    t = as_rational(t)

    @lru_cache(maxsize=None)
    def count(n, budget):
        if budget < 0:
            return 0
        if n == 0:
            return 1
        dj = d[n - 1]
        top = min(math.floor(dj), math.floor(budget * dj))
        return sum(count(n - 1, budget - Fraction(i) / dj) for i in range(top + 1))

    return count(len(d), t)


def volume_V(N: int, t) -> Fraction:
    """vol{x in [0,1]^N : x_1 + ... + x_N <= t}, exactly."""
    if N < 1:
        raise ValueError("N must be >= 1")
    t = as_rational(t)
    if t < 0 or t > N:
        raise OutOfRange(f"t = {t} outside [0, {N}]")
    total = Fraction(0)
    for k in range(math.floor(t) + 1):
        total += (-1) ** k * math.comb(N, k) * (t - k) ** N
    return total / math.factorial(N)


def solve_volume(N: int, c, tol=SOLVE_TOL) -> Fraction:
    """A dyadic t in [0, N] with |V(t) - c| <= tol.

    V is increasing with slope at most 1, so bisection on t until the
    bracket is shorter than ``tol`` suffices.
    """
    c = as_rational(c)
    tol = as_rational(tol)
    if not 0 < c < 1:
        raise OutOfRange(f"target volume {c} not in (0, 1)")
    lo, hi = Fraction(0), Fraction(N)
    while True:
        mid = (lo + hi) / 2
        v = volume_V(N, mid)
        if v == c:
            return mid
        if v < c:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            vlo, vhi = c - volume_V(N, lo), volume_V(N, hi) - c
            return lo if vlo <= vhi else hi


@dataclass(frozen=True)
class DensityRow:
    k: int
    count: int
    density: Fraction
    volume_density: Fraction
    volume: Fraction

    @property
    def relative_error(self) -> Fraction:
        return abs(self.density - self.volume) / self.volume


def density_check(d_base: Sequence, t, scales: Sequence[int]) -> List[DensityRow]:
    """Density of G_t(k d) inside the full box, against V(t), for each scale k.

    ``density`` divides by the number of lattice points of the box,
    ``volume_density`` by its volume prod(k d_j); both tend to V(t).
    """
    d_base = _check_d(d_base)
    t = as_rational(t)
    N = len(d_base)
    v = volume_V(N, t)
    rows = []
    for k in scales:
        d = [k * x for x in d_base]
        n = count_Gt(d, t)
        vol = math.prod(d)
        box = math.prod(math.floor(x) + 1 for x in d)
        rows.append(DensityRow(k, n, Fraction(n, box), Fraction(n) / vol, v))
    return rows
