"""The binomial/monomial interpolation matrix and the polynomial it produces.

The matrix A(X) has one column per multi-index ``a`` of the full box
``i_j <= d_j``.  For each point alpha_h there is a block of numeric rows
``C(a, i) alpha_h^(a - i)`` (one row per ``i`` in G_{t_h}), and a final
block of polynomial rows ``C(a, i) X^(a - i)`` for ``i`` in G_s.  The
determinant of a maximal-rank square submatrix is a polynomial that vanishes
to high weighted order at every alpha_h but not at beta.

Two parameter regimes are supported.  ``strict`` uses the constants of
the Roth-type argument (and produces matrices far too large to build); ``relaxed``
accepts small hand-picked parameters so the construction can actually run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .adelic import AdelicCurve, LogValue, Place, abs_log
from .combinatorics import enumerate_Gt, volume_V, solve_volume
from .errors import DegenerateAlphas, InfeasibleParams, RankDeficient, UndecidedComparison
from .exact_core import DEFAULT_WIDTH, RealInterval, as_rational, interval_log
from .heights import height_logvalue, height_poly
from .mvpoly import MvPoly, d_index

Index = Tuple[int, ...]


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------


def _log_int(m: int) -> LogValue:
    return LogValue.log_rational(m)


@dataclass(frozen=True)
class InterpolationParams:
    n: int
    N: int
    d: Tuple[Fraction, ...]
    s: Fraction
    t: Tuple[Fraction, ...]
    gamma: Fraction
    eta: Fraction
    mode: str = "relaxed"

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(as_rational(x) for x in self.d))
        object.__setattr__(self, "t", tuple(as_rational(x) for x in self.t))
        object.__setattr__(self, "s", as_rational(self.s))
        object.__setattr__(self, "gamma", as_rational(self.gamma))
        object.__setattr__(self, "eta", as_rational(self.eta))
        self.validate()

    # -- derived quantities ------------------------------------------------

    @property
    def columns(self) -> int:
        return math.prod(math.floor(x) + 1 for x in self.d)

    @property
    def volume_sum(self) -> Fraction:
        return volume_V(self.N, self.s) + sum(volume_V(self.N, t) for t in self.t)

    def row_counts(self) -> Tuple[int, List[int]]:
        return len(enumerate_Gt(self.d, self.s)), [len(enumerate_Gt(self.d, t)) for t in self.t]

    def dyson_bound(self) -> Fraction:
        """prod_{j<N} (1 + (n-1) sum_{i>j} d_i/d_j)."""
        out = Fraction(1)
        for j in range(self.N - 1):
            ratio = sum((self.d[i] / self.d[j] for i in range(j + 1, self.N)), Fraction(0))
            out *= 1 + (self.n - 1) * ratio
        return out

    def dyson_holds(self) -> bool:
        return self.volume_sum > self.dyson_bound()

    def sandwich_holds(self) -> bool:
        v = self.volume_sum
        return (1 + self.eta) ** self.N < v < 1 + 2 * self.N * self.eta

    # -- validation --------------------------------------------------------

    def validate(self):
        n, N = self.n, self.N
        if self.mode not in ("strict", "relaxed"):
            raise InfeasibleParams(f"unknown mode {self.mode!r}")
        if len(self.d) != N or len(self.t) != n:
            raise InfeasibleParams("d must have N entries and t must have n entries")
        if any(x <= 0 for x in self.d):
            raise InfeasibleParams("d_j must be positive")
        if not 0 < self.s < 1:
            raise InfeasibleParams(f"s = {self.s} not in (0, 1)")
        if any(not 0 < t < Fraction(N, 2) for t in self.t) and self.mode == "strict":
            raise InfeasibleParams("t_h must lie in (0, N/2)")
        if any(not 0 < t <= N for t in self.t):
            raise InfeasibleParams("t_h must lie in (0, N]")
        if self.mode == "relaxed":
            if n < 1 or N < 1:
                raise InfeasibleParams("need n >= 1 and N >= 1")
            g_s, g_t = self.row_counts()
            if g_s + sum(g_t) < self.columns:
                raise InfeasibleParams(
                    f"row surplus fails: {g_s} + {sum(g_t)} rows < {self.columns} columns")
            return
        if n < 2 or N < 2:
            raise InfeasibleParams("strict mode needs n, N >= 2")
        if not 0 < self.gamma < Fraction(1, 2 * n * N * N):
            raise InfeasibleParams("gamma must lie in (0, 1/(2nN^2))")
        if any(self.d[j + 1] / self.d[j] > self.gamma for j in range(N - 1)):
            raise InfeasibleParams("d_{j+1}/d_j must not exceed gamma")
        if self.eta != 2 * self.gamma * n:
            raise InfeasibleParams("eta must equal 2 gamma n")
        if not self.sandwich_holds():
            raise InfeasibleParams("volume condition (1+eta)^N < V(s)+sum V(t_h) < 1+2N eta fails")


def strict_threshold_holds(n: int, N: int) -> bool:
    """N > max(36/log 2n, 9 log 2n), decided exactly."""
    log2n = _log_int(2 * n)
    a = (log2n * N - LogValue.from_interval(RealInterval.exact(36))).sign() > 0
    b = (LogValue.from_interval(RealInterval.exact(N)) - log2n * 9).sign() > 0
    return a and b


def smallest_strict_N(n: int) -> int:
    N = 2
    while not strict_threshold_holds(n, N):
        N += 1
    return N


def params_recipe(n: int, N: int, mode: str = "strict", d=None, s=None, t=None,
                  gamma=None, eta=None) -> InterpolationParams:
    """Build parameters.

    ``strict``: eta = 1/(2 N^2 N!), gamma = eta/(2n), every t_h solves
    V(t_h) = (1 - eta N^2)/n and s is placed inside the admissible window
    for V(s).  ``d`` defaults to d_j = gamma^(j - N), the largest ratios allowed.
    ``relaxed``: ``d``, ``s`` and ``t`` are taken as given; gamma defaults to
    max d_{j+1}/d_j and eta to 2 gamma n.
    """
    if mode == "relaxed":
        if d is None or s is None or t is None:
            raise InfeasibleParams("relaxed mode needs d, s and t")
        d = tuple(as_rational(x) for x in d)
        if n < 1:
            raise InfeasibleParams("need at least one point (n >= 1)")
        if gamma is None:
            gamma = max((d[j + 1] / d[j] for j in range(len(d) - 1)), default=Fraction(0))
        if eta is None:
            eta = 2 * as_rational(gamma) * n
        t = tuple(t) if isinstance(t, (list, tuple)) else (t,) * n
        return InterpolationParams(n, N, d, s, t, gamma, eta, "relaxed")
    if mode != "strict":
        raise InfeasibleParams(f"unknown mode {mode!r}")
    if n < 2 or N < 2:
        raise InfeasibleParams("strict mode needs n, N >= 2")
    if not strict_threshold_holds(n, N):
        raise InfeasibleParams(
            f"N = {N} does not exceed max(36/log {2 * n}, 9 log {2 * n}); "
            f"smallest admissible N is {smallest_strict_N(n)}")
    fact = math.factorial(N)
    eta = Fraction(1, 2 * N * N * fact)
    gamma = eta / (2 * n)
    target_t = (1 - eta * N * N) / n
    th = solve_volume(N, target_t, tol=eta / (64 * n))
    vt = volume_V(N, th)
    # window for V(s): the sandwich minus the actual sum of V(t_h), intersected
    # with the tighter window derived from V(t_h) = (1 - eta N^2)/n
    rest = n * vt
    lo = max((1 + eta) ** N - rest, (1 + eta) ** N - 1 + eta * N * N)
    hi = min(1 + 2 * N * eta - rest, 2 * N * eta + eta * N * N)
    if not lo < hi:
        raise InfeasibleParams("no s satisfies the volume window")
    target_s = (lo + hi) / 2
    s_val = solve_volume(N, target_s, tol=(hi - lo) / 8)
    if d is None:
        d = tuple((1 / gamma) ** (N - 1 - j) for j in range(N))
    return InterpolationParams(n, N, tuple(d), s_val, (th,) * n, gamma, eta, "strict")


@dataclass
class ConstantChain:
    N: int
    n: int
    rho: Fraction
    checks: Dict[str, bool]

    @property
    def all_hold(self) -> bool:
        return all(self.checks.values())


def verify_constant_chain(params: InterpolationParams) -> ConstantChain:
    """Re-derive the inequalities of the strict recipe as exact comparisons."""
    n, N = params.n, params.N
    fact = math.factorial(N)
    eta = params.eta
    vs = volume_V(N, params.s)
    vts = [volume_V(N, t) for t in params.t]
    rho = Fraction(N, 2) - params.t[0]
    rho_bound = (_log_int(2 * n) * N - LogValue.from_interval(RealInterval.exact(rho * rho))).sign() > 0
    checks = {
        "eta = 1/(2N^2 N!)": eta == Fraction(1, 2 * N * N * fact),
        "V(s) = s^N/N!": vs == params.s**N / fact,
        "0 < s < 1": 0 < params.s < 1,
        "window for V(s)": (1 + eta) ** N - 1 + eta * N * N < vs < 2 * N * eta + eta * N * N,
        "volume sandwich": (1 + eta) ** N < vs + sum(vts) < 1 + 2 * N * eta,
        "N! < 1/V(s) < 2N!": fact < 1 / vs < 2 * fact,
        "N!/2n < V(t_h)/V(s) < 2N!/n": all(Fraction(fact, 2 * n) < v / vs < Fraction(2 * fact, n) for v in vts),
        "N^2 eta < V(s)": N * N * eta < vs,
        "rho < sqrt(N log 2n)": rho > 0 and rho_bound,
        "N > max(36/log 2n, 9 log 2n)": strict_threshold_holds(n, N),
    }
    return ConstantChain(N, n, rho, checks)


# ---------------------------------------------------------------------------
# the matrix
# ---------------------------------------------------------------------------


def _check_componentwise(alphas, beta=None):
    n = len(alphas)
    for h in range(n):
        for k in range(h + 1, n):
            for j, (x, y) in enumerate(zip(alphas[h], alphas[k])):
                if x == y:
                    raise DegenerateAlphas(f"alpha_{h + 1} and alpha_{k + 1} agree in coordinate {j + 1}")
    if beta is not None:
        for h in range(n):
            for j, (x, y) in enumerate(zip(alphas[h], beta)):
                if x == y:
                    raise DegenerateAlphas(f"beta agrees with alpha_{h + 1} in coordinate {j + 1}")


def _binom(a: Index, i: Index) -> int:
    return math.prod(math.comb(x, y) for x, y in zip(a, i))


def _monomial_value(point, e):
    out = 1
    for x, k in zip(point, e):
        if k:
            out = out * x**k
    return out


@dataclass
class InterpolationMatrix:
    params: InterpolationParams
    alphas: Tuple[Tuple, ...]
    columns: List[Index]
    numeric_rows: List[Tuple[int, Index, List]]
    symbolic_rows: List[Tuple[Index, List[Tuple[int, int, Index]]]]

    @property
    def row_keys(self) -> List[Tuple]:
        return [("alpha", h, i) for h, i, _ in self.numeric_rows] + [("X", i) for i, _ in self.symbolic_rows]

    def symbolic_entries(self, row: int) -> List[MvPoly]:
        """Row of the polynomial block as a list of MvPoly (zero where C(a, i) = 0)."""
        N = self.params.N
        i, entries = self.symbolic_rows[row]
        out = [MvPoly({}, N) for _ in self.columns]
        for col, c, e in entries:
            out[col] = MvPoly({e: c}, N)
        return out

    def evaluate_symbolic(self, row: int, point) -> List:
        i, entries = self.symbolic_rows[row]
        out = [0] * len(self.columns)
        for col, c, e in entries:
            out[col] = c * _monomial_value(point, e)
        return out


def build_A(params: InterpolationParams, alphas: Sequence[Sequence], check: bool = True) -> InterpolationMatrix:
    """The matrix A(X) for the given parameters and points."""
    alphas = tuple(tuple(a) for a in alphas)
    if len(alphas) != params.n or any(len(a) != params.N for a in alphas):
        raise DegenerateAlphas(f"need {params.n} points with {params.N} coordinates")
    if check:
        _check_componentwise(alphas)
    cols = enumerate_Gt(params.d, params.N)
    numeric = []
    for h, (alpha, t) in enumerate(zip(alphas, params.t)):
        for i in enumerate_Gt(params.d, t):
            row = []
            for a in cols:
                if all(x >= y for x, y in zip(a, i)):
                    e = tuple(x - y for x, y in zip(a, i))
                    row.append(_binom(a, i) * _monomial_value(alpha, e))
                else:
                    row.append(0)
            numeric.append((h, i, row))
    symbolic = []
    for i in enumerate_Gt(params.d, params.s):
        entries = []
        for col, a in enumerate(cols):
            if all(x >= y for x, y in zip(a, i)):
                entries.append((col, _binom(a, i), tuple(x - y for x, y in zip(a, i))))
        symbolic.append((i, entries))
    return InterpolationMatrix(params, alphas, cols, numeric, symbolic)


# ---------------------------------------------------------------------------
# selection
# ---------------------------------------------------------------------------


class _Echelon:
    """Incremental row echelon basis over a field."""

    def __init__(self, width: int):
        self.width = width
        self.rows: List[Tuple[int, List]] = []

    def reduce(self, v: List) -> List:
        v = list(v)
        for pc, row in self.rows:
            c = v[pc]
            if c != 0:
                v = [x - c * y if y != 0 else x for x, y in zip(v, row)]
        return v

    def add(self, v: List) -> bool:
        v = self.reduce(v)
        for pc, x in enumerate(v):
            if x != 0:
                inv = 1 / x if not isinstance(x, int) else Fraction(1, x)
                self.rows.append((pc, [y * inv for y in v]))
                return True
        return False

    @property
    def rank(self) -> int:
        return len(self.rows)


@dataclass
class Selection:
    rows: List[int]           # indices into A.row_keys, in increasing order
    keys: List[Tuple]
    beta: Tuple

    @property
    def monomial_rows(self) -> int:
        return sum(1 for k in self.keys if k[0] == "X")


def _dyson_message(params: InterpolationParams) -> str:
    v, bound = params.volume_sum, params.dyson_bound()
    verdict = "holds" if v > bound else "fails"
    return (f"Dyson volume condition V(s)+sum V(t_h) > prod(1+(n-1) sum d_i/d_j): "
            f"{float(v):.6g} vs {float(bound):.6g} ({verdict})")


def select_submatrix(A: InterpolationMatrix, beta: Sequence, check: bool = True) -> Selection:
    """Rows of a nonsingular square submatrix of A(beta).

    Every polynomial row is taken first; numeric rows follow in (h, lex i)
    order and are kept when they raise the rank.
    """
    beta = tuple(beta)
    if check:
        _check_componentwise(A.alphas, beta)
    r = len(A.columns)
    ech = _Echelon(r)
    nnum = len(A.numeric_rows)
    chosen = []
    for k in range(len(A.symbolic_rows)):
        if not ech.add(A.evaluate_symbolic(k, beta)):
            raise RankDeficient("polynomial rows are dependent at beta", rank=ech.rank, columns=r,
                                condition=_dyson_message(A.params))
        chosen.append(nnum + k)
    for k, (_, _, row) in enumerate(A.numeric_rows):
        if ech.rank == r:
            break
        if ech.add(row):
            chosen.append(k)
    if ech.rank < r:
        raise RankDeficient(f"A(beta) has rank {ech.rank} < {r} columns; " + _dyson_message(A.params),
                            rank=ech.rank, columns=r, condition=_dyson_message(A.params))
    chosen.sort()
    keys = A.row_keys
    return Selection(chosen, [keys[k] for k in chosen], beta)


# ---------------------------------------------------------------------------
# determinant: Schur complement + cofactor expansion
# ---------------------------------------------------------------------------


def _split_selection(A: InterpolationMatrix, sel: Selection):
    nnum = len(A.numeric_rows)
    numeric = [list(A.numeric_rows[k][2]) for k in sel.rows if k < nnum]
    symbolic = [A.symbolic_entries(k - nnum) for k in sel.rows if k >= nnum]
    return numeric, symbolic


def _perm_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    seen = [False] * len(seq)
    for i in range(len(seq)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = seq[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _laplace_det(mat: List[List[MvPoly]], nvars: int) -> MvPoly:
    k = len(mat)
    if k == 0:
        return MvPoly.constant(1, nvars)

    @lru_cache(maxsize=None)
    def det(cols: Tuple[int, ...]) -> MvPoly:
        row = k - len(cols)
        if len(cols) == 1:
            return mat[row][cols[0]]
        total = MvPoly({}, nvars)
        for pos, c in enumerate(cols):
            entry = mat[row][c]
            if entry.is_zero():
                continue
            minor = det(cols[:pos] + cols[pos + 1:])
            term = entry * minor
            total = total + term if pos % 2 == 0 else total - term
        return total

    return det(tuple(range(k)))


def _delta_cofactor(A: InterpolationMatrix, sel: Selection) -> MvPoly:
    nvars = A.params.N
    numeric, symbolic = _split_selection(A, sel)
    m, r = len(numeric), len(A.columns)
    # forward elimination of the numeric block, pivot columns left to right
    R = [[Fraction(x) if not hasattr(x, "field") else x for x in row] for row in numeric]
    pivots: List[int] = []
    det_rp = Fraction(1)
    row = 0
    for c in range(r):
        if row == m:
            break
        p = next((i for i in range(row, m) if R[i][c] != 0), None)
        if p is None:
            continue
        if p != row:
            R[row], R[p] = R[p], R[row]
            det_rp = -det_rp
        pv = R[row][c]
        det_rp = det_rp * pv
        for i in range(row + 1, m):
            f = R[i][c]
            if f != 0:
                f = f / pv
                R[i] = [x - f * y for x, y in zip(R[i], R[row])]
        pivots.append(c)
        row += 1
    if row < m:
        return MvPoly({}, nvars)
    # back substitution to reduced form: R -> [I | W] on (pivots, free)
    for i in range(m - 1, -1, -1):
        pv = R[i][pivots[i]]
        R[i] = [x / pv for x in R[i]]
        for k in range(i):
            f = R[k][pivots[i]]
            if f != 0:
                R[k] = [x - f * y for x, y in zip(R[k], R[i])]
    free = [c for c in range(r) if c not in set(pivots)]
    # Schur complement S_F - S_P W
    schur = []
    for srow in symbolic:
        out_row = []
        for f in free:
            entry = srow[f]
            for l, pc in enumerate(pivots):
                w = R[l][f]
                if w != 0 and not srow[pc].is_zero():
                    entry = entry - srow[pc] * w
            out_row.append(entry)
        schur.append(out_row)
    det_s = _laplace_det(schur, nvars)
    return det_s * (det_rp * _perm_sign(pivots + free))


# ---------------------------------------------------------------------------
# determinant: fraction-free (Bareiss) elimination
# ---------------------------------------------------------------------------


def _delta_bareiss(A: InterpolationMatrix, sel: Selection) -> MvPoly:
    nvars = A.params.N
    numeric, symbolic = _split_selection(A, sel)
    M: List[List[MvPoly]] = [[MvPoly.constant(x, nvars) for x in row] for row in numeric] + symbolic
    r = len(M)
    sign = 1
    prev: object = 1
    for k in range(r):
        # prefer a constant pivot; fall back to the sparsest nonzero entry
        best = None
        for i in range(k, r):
            for j in range(k, r):
                e = M[i][j]
                if e.is_zero():
                    continue
                score = (0 if e.is_constant() else 1, len(e))
                if best is None or score < best[0]:
                    best = (score, i, j)
            if best is not None and best[0][0] == 0:
                break
        if best is None:
            return MvPoly({}, nvars)
        _, i, j = best
        if i != k:
            M[k], M[i] = M[i], M[k]
            sign = -sign
        if j != k:
            for row in M:
                row[k], row[j] = row[j], row[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, r):
            mik = M[i][k]
            for j in range(k + 1, r):
                v = pivot * M[i][j]
                if not mik.is_zero() and not M[k][j].is_zero():
                    v = v - mik * M[k][j]
                M[i][j] = v.exact_div(prev) if not (isinstance(prev, int) and prev == 1) else v
            M[i][k] = MvPoly({}, nvars)
        prev = pivot if not pivot.is_constant() else pivot.constant_term()
    det = M[r - 1][r - 1]
    return det * sign


def delta_poly(A: InterpolationMatrix, sel: Selection, method: str = "cofactor") -> MvPoly:
    """det M(X) for the selected rows (kept in the row order of A).

    ``cofactor`` eliminates the numeric rows exactly and expands the
    remaining polynomial Schur complement by cofactors; ``elimination`` runs
    fraction-free elimination on the whole matrix with polynomial entries.
    """
    if len(sel.rows) != len(A.columns):
        raise RankDeficient("selection is not square", rank=len(sel.rows), columns=len(A.columns))
    if method == "cofactor":
        delta = _delta_cofactor(A, sel)
    elif method == "elimination":
        delta = _delta_bareiss(A, sel)
    else:
        raise ValueError(f"unknown determinant method {method!r}")
    if delta.is_zero():
        raise RankDeficient("the selected submatrix is singular", rank=None, columns=len(A.columns),
                            condition=_dyson_message(A.params))
    return delta


# ---------------------------------------------------------------------------
# certificate
# ---------------------------------------------------------------------------


def _height0(x, curve: AdelicCurve) -> LogValue:
    # height of a matrix entry; 0 is given height 0
    x = curve.coerce(x)
    return LogValue() if x == 0 else height_logvalue(x, curve)


@dataclass
class InterpolationCertificate:
    delta: MvPoly
    delta_at_beta: object
    deg_measured: Tuple[int, ...]
    deg_hard_bound: Tuple[int, ...]
    deg_volume_bound: Tuple[Fraction, ...]
    index_measured: Tuple[Fraction, ...]
    index_lower_bound: Tuple[Fraction, ...]
    height_measured: RealInterval
    height_upper_bound: RealInterval
    hard_pass: bool

    def ratios(self) -> Dict[str, list]:
        """measured / bound for the reported (non-asserted) quantities."""
        idx = [float(m / b) if b != 0 else None for m, b in zip(self.index_measured, self.index_lower_bound)]
        hb = float(self.height_upper_bound.mid)
        return {
            "index": idx,
            "height": float(self.height_measured.mid) / hb if hb else None,
            "degree": [float(m / b) if b else None for m, b in zip(self.deg_measured, self.deg_volume_bound)],
        }


def certify(delta: MvPoly, params: InterpolationParams, alphas, beta, curve: AdelicCurve,
            width=DEFAULT_WIDTH) -> InterpolationCertificate:
    """Hard checks (delta(beta) != 0, degree bound) plus reported index/height comparisons."""
    N = params.N
    n_s = len(enumerate_Gt(params.d, params.s))
    at_beta = delta.evaluate(tuple(beta))
    deg = delta.degrees()
    hard = tuple(n_s * math.floor(dj) for dj in params.d)
    dprod = math.prod(params.d)
    vs = volume_V(N, params.s)
    vts = [volume_V(N, t) for t in params.t]
    index = tuple(d_index(delta, a, params.d) for a in alphas)
    index_bound = tuple(dprod * vs * (t - params.s - 2 * N * N * params.eta / vs) for t in params.t)
    deg_bound = tuple(dprod * dj * vs for dj in params.d)
    hb = LogValue()
    for j, dj in enumerate(params.d):
        col = LogValue.log_prime(2)
        for h, alpha in enumerate(alphas):
            col = col + _height0(alpha[j], curve) * vts[h]
        hb = hb + col * dj
    hb = hb * dprod
    h_delta = height_poly(delta, curve, width)
    hard_pass = at_beta != 0 and all(m <= b for m, b in zip(deg, hard))
    return InterpolationCertificate(delta, at_beta, deg, hard, deg_bound, index, index_bound,
                                    h_delta, hb.interval(width), hard_pass)


# ---------------------------------------------------------------------------
# gap conditions and bounding functions
# ---------------------------------------------------------------------------


@dataclass
class ApproxMatrix:
    alphas: Tuple[Tuple, ...]
    beta: Tuple

    def __post_init__(self):
        self.alphas = tuple(tuple(a) for a in self.alphas)
        self.beta = tuple(self.beta)
        _check_componentwise(self.alphas, self.beta)

    @property
    def n(self) -> int:
        return len(self.alphas)

    @property
    def N(self) -> int:
        return len(self.beta)


@dataclass
class GapReport:
    log_rho: List[LogValue]
    log_rho_prime: List[LogValue]
    h_gap_holds: bool
    lam: List[LogValue]
    lambda_gap_holds: bool

    def intervals(self, width=DEFAULT_WIDTH) -> Dict[str, List[RealInterval]]:
        return {
            "log_rho": [x.interval(width) for x in self.log_rho],
            "log_rho_prime": [x.interval(width) for x in self.log_rho_prime],
            "lambda": [x.interval(width) for x in self.lam],
        }


def log_rho(T: ApproxMatrix, j: int, curve: AdelicCurve, N_fact: int) -> LogValue:
    n = T.n
    out = LogValue.log_prime(2, 4 * N_fact) + _height0(T.beta[j], curve)
    for a in T.alphas:
        out = out + _height0(a[j], curve) * Fraction(2 * N_fact, n)
    return out


def log_rho_prime(T: ApproxMatrix, j: int, curve: AdelicCurve, N_fact: int) -> LogValue:
    """Uses column j + 1; defined for j < N - 1 (0-based)."""
    n = T.n
    out = LogValue.log_prime(2, 2 * N_fact) + _height0(T.beta[j + 1], curve)
    for a in T.alphas:
        out = out + _height0(a[j + 1], curve) * Fraction(N_fact, 2 * n)
    return out


def lambda_value(T: ApproxMatrix, j: int, params: InterpolationParams, curve: AdelicCurve) -> LogValue:
    N = params.N
    vs = volume_V(N, params.s)
    out = LogValue.log_prime(2, Fraction(2) / vs) + _height0(T.beta[j], curve)
    for h, a in enumerate(T.alphas):
        out = out + _height0(a[j], curve) * (volume_V(N, params.t[h]) / vs)
    return out


def gap_report(T: ApproxMatrix, params: InterpolationParams, curve: AdelicCurve) -> GapReport:
    """The consecutive-column separation conditions for T(beta).

    log rho_j and log rho'_j are kept as exact log values (rho itself has
    about N! log 4 digits).  The h-gap ratio is tested for consecutive columns.
    """
    N = params.N
    fact = math.factorial(N)
    lr = [log_rho(T, j, curve, fact) for j in range(N)]
    lrp = [log_rho_prime(T, j, curve, fact) for j in range(N - 1)]
    # log rho_j / log rho'_j < 1/(4 N^2 N!)  <=>  log rho'_j - 4 N^2 N! log rho_j > 0
    h_gap = all((lrp[j] - lr[j] * (4 * N * N * fact)).sign() > 0 for j in range(N - 1))
    lam = [lambda_value(T, j, params, curve) for j in range(N)]
    # lambda_j / lambda_{j+1} < eta/(2n)  <=>  eta lambda_{j+1} - 2n lambda_j > 0
    lam_gap = all((lam[j + 1] * params.eta - lam[j] * (2 * params.n)).sign() > 0 for j in range(N - 1))
    return GapReport(lr, lrp, h_gap, lam, lam_gap)


LabeledPlace = Tuple[Place, int]


def s_hat(S: Sequence[LabeledPlace], T: ApproxMatrix, curve: AdelicCurve) -> List[LabeledPlace]:
    """Labelled places of S at which every |alpha_h^(j) - beta^(j)| < 1."""
    out = []
    for place, label in S:
        ok = True
        for a in T.alphas:
            for x, b in zip(a, T.beta):
                v = abs_log(curve.coerce(x) - curve.coerce(b), place)
                if v.is_zero() or v.sign() >= 0:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append((place, label))
    return out


def bounding_lhs(place: Place, h: int, j: int, T: ApproxMatrix, scale: LogValue, curve: AdelicCurve) -> LogValue:
    """-log|alpha_h^(j) - beta^(j)| at ``place``, before division by ``scale``."""
    diff = curve.coerce(T.alphas[h][j]) - curve.coerce(T.beta[j])
    return -abs_log(diff, place)


def bounding_check(theta: Mapping[Place, Fraction], T: ApproxMatrix, params: InterpolationParams,
                   curve: AdelicCurve, kind: str, S: Sequence[LabeledPlace]) -> bool:
    """Is theta a column-bounding (``column``) or lambda-bounding (``lambda``) function?

    Labels in ``S`` are 0-based row indices h.  The strict inequality
    -log|alpha_h^(j) - beta^(j)| / L_j > theta is checked on S-hat_h for
    every column j, with L_j = log rho_j or lambda_j.
    """
    N = params.N
    if kind == "column":
        fact = math.factorial(N)
        scales = [log_rho(T, j, curve, fact) for j in range(N)]
    elif kind == "lambda":
        scales = [lambda_value(T, j, params, curve) for j in range(N)]
    else:
        raise ValueError(f"unknown bounding kind {kind!r}")
    for place, h in s_hat(S, T, curve):
        th = as_rational(theta[place])
        for j in range(N):
            lhs = bounding_lhs(place, h, j, T, scales[j], curve)
            if (lhs - scales[j] * th).sign() <= 0:
                return False
    return True
