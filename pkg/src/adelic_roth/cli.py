"""Command-line front end.

Exit codes: 0 success (or the checked property holds), 1 property violated,
2 usage or parse error, 3 rank-deficient interpolation matrix.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .adelic import AdelicCurve, LogValue, Place, abs_log, log_minus, product_formula_defect
from .combinatorics import density_check, enumerate_Gt, volume_V
from .continued_fractions import convergents, partial_quotients
from .errors import (
    AdelicError,
    DegenerateAlphas,
    InfeasibleParams,
    NonQuadraticAlpha,
    RankDeficient,
    SquareInput,
)
from .exact_core import QFElement, RealInterval, as_rational, format_element, parse_element
from .heights import equicontinuity_gap, height_logvalue, height_report, northcott_enumerate
from .interpolation import (
    ApproxMatrix,
    build_A,
    certify,
    delta_poly,
    gap_report,
    params_recipe,
    select_submatrix,
    verify_constant_chain,
)

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_RANK = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------


def fmt_decimal(x, digits: int) -> str:
    """Fixed-point decimal of an exact rational, rounded half to even."""
    x = as_rational(x)
    scaled = round(x * 10**digits)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    if digits == 0:
        return f"{sign}{scaled}"
    s = str(scaled).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


class Output:
    def __init__(self, args):
        self.bits = args.precision
        self.width = Fraction(1, 2**self.bits)
        self.digits = max(6, min(40, int(self.bits * 0.30103) - 2))
        self.json = args.json
        self.out = args.out
        self.lines: List[str] = []

    def num(self, x) -> str:
        if isinstance(x, LogValue):
            x = x.interval(self.width)
        if isinstance(x, RealInterval):
            x = x.mid
        return fmt_decimal(x, self.digits)

    def interval(self, enc: RealInterval) -> Dict[str, str]:
        return {"lo": fmt_decimal(enc.lo, self.digits), "hi": fmt_decimal(enc.hi, self.digits)}

    def emit_text(self, line: str = ""):
        self.lines.append(line)

    def finish(self, document: Optional[dict] = None, table: Optional[List[dict]] = None):
        if self.json:
            text = json.dumps(document if document is not None else {"rows": table}, indent=2, sort_keys=True)
        elif table is not None:
            buf = io.StringIO()
            if table:
                w = csv.DictWriter(buf, fieldnames=list(table[0].keys()), lineterminator="\n")
                w.writeheader()
                w.writerows(table)
            text = "\n".join(self.lines + [buf.getvalue().rstrip("\n")]) if self.lines else buf.getvalue().rstrip("\n")
        else:
            text = "\n".join(self.lines)
        if self.out:
            with open(self.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------


def parse_field(text: str) -> AdelicCurve:
    t = text.strip().lower().replace(" ", "")
    if t in ("q", "qq"):
        return AdelicCurve.rationals()
    m = re.fullmatch(r"q\((-?\d+)\)", t)
    if not m:
        raise UsageError(f"bad field {text!r}; use q or q(D)")
    try:
        return AdelicCurve.quadratic(int(m.group(1)))
    except (AdelicError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def parse_in_curve(text: str, curve: AdelicCurve):
    try:
        x = parse_element(text, curve.field)
    except (AdelicError, ValueError) as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from exc
    if isinstance(x, QFElement) and curve.field is None:
        raise UsageError(f"{text!r} is irrational; pass --field q({x.field.d})")
    return curve.coerce(x)


def parse_vector(text: str) -> List[Fraction]:
    try:
        return [as_rational(p) for p in text.replace(" ", "").split(",") if p]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad vector {text!r}") from exc


def parse_log_bound(text: str) -> LogValue:
    t = text.strip().replace(" ", "")
    m = re.fullmatch(r"(?:(-?\d+(?:/\d+)?)\*)?log\((\d+(?:/\d+)?)\)", t)
    if m:
        coeff = as_rational(m.group(1)) if m.group(1) else Fraction(1)
        return LogValue.log_rational(as_rational(m.group(2))) * coeff
    try:
        return LogValue.from_interval(RealInterval.exact(as_rational(t)))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad bound {text!r}; use a rational or log(m)") from exc


CONFIG_KEYS = {"mode", "n", "N", "d", "s", "t", "alphas", "beta", "field", "precision"}


def read_config(path: str) -> Dict[str, str]:
    """Plain ``key = value`` lines; ``#`` starts a comment; unknown keys are rejected."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_product_formula(args, out: Output) -> int:
    curve = parse_field(args.field)
    a = parse_in_curve(args.element, curve)
    if a == 0:
        raise UsageError("the product formula needs a nonzero element")
    rows = []
    for w in curve.places_for([a]):
        v = abs_log(a, w)
        rows.append({"place": str(w), "measure": str(curve.measure(w)),
                     "log_abs": out.num(v), "exact": repr(v)})
    defect = product_formula_defect(a, curve)
    enc = defect.interval(out.width)
    ok = not defect.finite_part and not defect.unit_part and enc.contains(0)
    for r in rows:
        out.emit_text(f"{r['place']:<32} mu={r['measure']:<6} log|a| = {r['log_abs']}")
    out.emit_text(f"defect = {repr(defect)}  ({'exact zero' if ok else 'NONZERO'})")
    out.finish({"element": format_element(a), "field": args.field, "places": rows,
                "defect": repr(defect), "holds": ok})
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_height(args, out: Output) -> int:
    curve = parse_field(args.field)
    a = parse_in_curve(args.element, curve)
    if a == 0:
        raise UsageError("the height of 0 is undefined")
    rep = height_report(a, curve, out.width)
    for w, v in rep.per_place:
        out.emit_text(f"{str(w):<32} log+|a| = {out.num(v)}")
    out.emit_text(f"h({format_element(a)}) = {out.num(rep.h)}  exact: {rep.h_exact!r}")
    out.finish({"element": format_element(a), "h": out.num(rep.h), "h_interval": out.interval(rep.h),
                "exact": repr(rep.h_exact),
                "per_place": [{"place": str(w), "log_plus": out.num(v)} for w, v in rep.per_place]})
    return EXIT_OK


def roth_records(alpha: QFElement, count: int, eps: Fraction, width: Fraction):
    """Defect of the convergents of ``alpha`` at the archimedean place of Q."""
    q_curve = AdelicCurve.rationals()
    inf_plus = Place("archimedean", embedding="plus", field_d=alpha.field.d)
    pq = partial_quotients(alpha, count)
    records = []
    for k, beta in enumerate(convergents(pq)):
        if beta == 0:
            continue
        hb = height_logvalue(beta, q_curve)
        if hb.is_zero():
            continue
        diff = QFElement(beta, 0, alpha.field) - alpha
        lm = log_minus(abs_log(diff, inf_plus))
        hb_i = hb.interval(width)
        lm_i = lm.interval(width)
        defect = (-lm_i) / hb_i
        # sum of log- integrals > -(2 + eps) h(beta)
        holds = (lm + hb * (2 + eps)).sign() > 0
        records.append({"k": k, "beta": beta, "h_beta": hb_i, "log_minus_sum": lm_i,
                        "defect": defect, "inequality_holds": holds})
    return records


def cmd_roth(args, out: Output) -> int:
    try:
        alpha = parse_element(args.alpha)
    except (AdelicError, ValueError) as exc:
        raise UsageError(f"cannot parse alpha {args.alpha!r}: {exc}") from exc
    if not isinstance(alpha, QFElement) or alpha.b == 0:
        raise NonQuadraticAlpha(f"{args.alpha} is not a quadratic irrational")
    eps = as_rational(args.epsilon)
    tol = as_rational(args.tol)
    recs = roth_records(alpha, args.count, eps, out.width)
    # empirical constant: smallest h(beta) after which every record satisfies the inequality
    last_fail = max((i for i, r in enumerate(recs) if not r["inequality_holds"]), default=-1)
    threshold = recs[last_fail + 1]["h_beta"] if last_fail + 1 < len(recs) else None
    tail = [r for r in recs if r["k"] >= args.tail_from]
    in_band = all(2 - tol <= r["defect"].lo and r["defect"].hi <= 2 + tol for r in tail)
    table = [{"k": r["k"], "beta": str(r["beta"]), "h_beta": out.num(r["h_beta"]),
              "log_minus_sum": out.num(r["log_minus_sum"]), "defect": out.num(r["defect"]),
              "inequality_holds": int(r["inequality_holds"])} for r in recs]
    summary = {"alpha": format_element(alpha), "epsilon": str(eps),
               "empirical_threshold_C": None if threshold is None else out.num(threshold),
               "threshold_certified": False, "tail_from": args.tail_from, "tail_in_band": in_band}
    if args.json:
        out.finish({"summary": summary, "rows": table})
    else:
        out.emit_text(f"# alpha={summary['alpha']} eps={eps} empirical C (non-certified)="
                      f"{summary['empirical_threshold_C']} tail k>={args.tail_from} in [2-{tol},2+{tol}]: {in_band}")
        out.finish(table=table)
    return EXIT_OK if in_band else EXIT_VIOLATED


def cmd_equicontinuity(args, out: Output) -> int:
    recs = [equicontinuity_gap(args.p, k, out.width) for k in range(1, args.count + 1)]
    increasing = all(a.gap.hi < b.gap.lo for a, b in zip(recs, recs[1:]))
    table = [{"k": r.k, "a": r.pell_solution[0], "b": r.pell_solution[1], "gap": out.num(r.gap),
              "gap_lo": fmt_decimal(r.gap.lo, out.digits), "gap_hi": fmt_decimal(r.gap.hi, out.digits)}
             for r in recs]
    if args.json:
        out.finish({"p": args.p, "strictly_increasing": increasing, "rows": table})
    else:
        out.finish(table=table)
    return EXIT_OK if increasing else EXIT_VIOLATED


def _interp_settings(args) -> Dict[str, str]:
    cfg = read_config(args.config) if args.config else {}
    for key in ("n", "N", "d", "s", "t", "alphas", "beta"):
        v = getattr(args, f"p_{key}")
        if v is not None:
            cfg[key] = v
    if args.mode_given:
        cfg["mode"] = args.mode
    cfg.setdefault("mode", args.mode)
    if args.field_given or "field" not in cfg:
        cfg["field"] = args.field
    return cfg


def cmd_interpolate(args, out: Output) -> int:
    cfg = _interp_settings(args)
    curve = parse_field(cfg["field"])
    mode = cfg["mode"]
    try:
        n, N = int(cfg["n"]), int(cfg["N"])
    except (KeyError, ValueError) as exc:
        raise UsageError("interpolate needs integer n and N") from exc
    if mode == "strict":
        params = params_recipe(n, N, "strict")
        chain = verify_constant_chain(params)
        for name, ok in chain.checks.items():
            out.emit_text(f"{'ok  ' if ok else 'FAIL'} {name}")
        out.emit_text("strict parameters only: the matrix has about prod(d_j) columns and is not built")
        out.finish({"mode": "strict", "n": n, "N": N, "checks": chain.checks,
                    "s": str(params.s), "t": [str(x) for x in params.t], "eta": str(params.eta)})
        return EXIT_OK if chain.all_hold else EXIT_VIOLATED
    if mode != "relaxed":
        raise UsageError(f"unknown mode {mode!r}")
    try:
        d = parse_vector(cfg["d"])
        s = as_rational(cfg["s"])
        t = parse_vector(cfg["t"])
        alphas = [[parse_in_curve(x, curve) for x in row.split(",")] for row in cfg["alphas"].split(";")]
        beta = [parse_in_curve(x, curve) for x in cfg["beta"].split(",")]
    except KeyError as exc:
        raise UsageError(f"interpolate needs key {exc.args[0]!r}") from exc
    if len(t) == 1 and n > 1:
        t = t * n
    params = params_recipe(n, N, "relaxed", d=d, s=s, t=t)
    A = build_A(params, alphas)
    sel = select_submatrix(A, beta)
    delta = delta_poly(A, sel, "cofactor")
    cert = certify(delta, params, alphas, beta, curve, out.width)
    T = ApproxMatrix(alphas, beta)
    gaps = gap_report(T, params, curve)
    doc = {
        "mode": "relaxed",
        "columns": len(A.columns),
        "rows": len(A.row_keys),
        "selection": [list(map(str, k)) for k in sel.keys],
        "monomial_rows_selected": sel.monomial_rows,
        "dyson_condition_holds": params.dyson_holds(),
        "delta_terms": len(delta),
        "delta_at_beta": str(cert.delta_at_beta),
        "deg_measured": list(cert.deg_measured),
        "deg_hard_bound": list(cert.deg_hard_bound),
        "index_measured": [str(x) for x in cert.index_measured],
        "index_lower_bound": [str(x) for x in cert.index_lower_bound],
        "height_measured": out.num(cert.height_measured),
        "height_upper_bound": out.num(cert.height_upper_bound),
        "hard_pass": cert.hard_pass,
        "h_gap_holds": gaps.h_gap_holds,
        "lambda_gap_holds": gaps.lambda_gap_holds,
        "log_rho": [out.num(x) for x in gaps.log_rho],
        "lambda": [out.num(x) for x in gaps.lam],
    }
    for key, value in doc.items():
        out.emit_text(f"{key}: {value}")
    out.finish(doc)
    return EXIT_OK if cert.hard_pass else EXIT_VIOLATED


def cmd_volumes(args, out: Output) -> int:
    d = parse_vector(args.d)
    t = as_rational(args.t)
    if not 0 <= t <= len(d):
        raise UsageError(f"t must lie in [0, {len(d)}]")
    scales = [int(k) for k in args.scales.split(",")]
    rows = density_check(d, t, scales)
    table = [{"k": r.k, "count": r.count, "V": str(r.volume), "density": out.num(r.density),
              "volume_density": out.num(r.volume_density),
              "relative_error": out.num(r.relative_error)} for r in rows]
    out.finish(table=table)
    return EXIT_OK


def cmd_gt(args, out: Output) -> int:
    d = parse_vector(args.d)
    t = as_rational(args.t)
    if not 0 <= t <= len(d):
        raise UsageError(f"t must lie in [0, {len(d)}]")
    idx = enumerate_Gt(d, t)
    v = volume_V(len(d), t)
    box = 1
    for x in d:
        box *= int(x) + 1
    dens = Fraction(len(idx), box)
    doc = {"count": len(idx), "V": str(v), "density": out.num(dens),
           "relative_error": out.num(abs(dens - v) / v) if v else None,
           "indices": [list(i) for i in idx]}
    out.emit_text(f"|G_t| = {len(idx)}  V(t) = {v}  density = {doc['density']}")
    for i in idx:
        out.emit_text(" ".join(map(str, i)))
    out.finish(doc)
    return EXIT_OK


def cmd_northcott(args, out: Output) -> int:
    C = parse_log_bound(args.C)
    elems = northcott_enumerate(C)
    out.emit_text(f"{len(elems)} rationals of height <= {args.C}")
    for x in elems:
        out.emit_text(str(x))
    out.finish({"C": args.C, "count": len(elems), "elements": [str(x) for x in elems]})
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Given(argparse.Action):
    # records that an option was passed explicitly, so config files can be overridden
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        setattr(namespace, f"{self.dest}_given", True)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="q", action=_Given, help="q or q(D)")
    common.add_argument("--json", action="store_true", help="emit one JSON document")
    common.add_argument("--out", help="write output to FILE")
    common.add_argument("--precision", type=int, default=64, help="interval width 2^-BITS")
    common.add_argument("--mode", default="relaxed", choices=("strict", "relaxed"), action=_Given)
    common.add_argument("--config", help="key = value parameter file")

    p = argparse.ArgumentParser(prog="adelic-roth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check-product-formula", aliases=["check"], parents=[common],
                       help="integrate log|a| over all places")
    c.add_argument("element")
    c.set_defaults(func=cmd_product_formula)

    c = sub.add_parser("height", parents=[common], help="height of a field element")
    c.add_argument("element")
    c.set_defaults(func=cmd_height)

    c = sub.add_parser("roth", parents=[common], help="approximation defect of convergents")
    c.add_argument("--alpha", default="sqrt(2)")
    c.add_argument("--count", type=int, default=30)
    c.add_argument("--epsilon", default="1/2")
    c.add_argument("--tol", default="1/10")
    c.add_argument("--tail-from", type=int, default=10)
    c.set_defaults(func=cmd_roth)

    c = sub.add_parser("equicontinuity", parents=[common], help="Pell-unit gap sequence")
    c.add_argument("--p", type=int, default=2)
    c.add_argument("--count", type=int, default=10)
    c.set_defaults(func=cmd_equicontinuity)

    c = sub.add_parser("interpolate", parents=[common], help="build and certify the interpolating polynomial")
    for key in ("n", "N", "d", "s", "t", "alphas", "beta"):
        c.add_argument(f"--{key}", dest=f"p_{key}")
    c.set_defaults(func=cmd_interpolate)

    c = sub.add_parser("volumes", parents=[common], help="density of G_t against V(t)")
    c.add_argument("--d", default="4,2")
    c.add_argument("--t", default="1")
    c.add_argument("--scales", default="1,10,50")
    c.set_defaults(func=cmd_volumes)

    c = sub.add_parser("gt", parents=[common], help="list the multi-index set G_t")
    c.add_argument("--d", default="4,2")
    c.add_argument("--t", default="1")
    c.set_defaults(func=cmd_gt)

    c = sub.add_parser("northcott", parents=[common], help="rationals of bounded height")
    c.add_argument("C", help="a rational or log(m)")
    c.set_defaults(func=cmd_northcott)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for flag in ("field", "mode"):
        if not hasattr(args, f"{flag}_given"):
            setattr(args, f"{flag}_given", False)
    if args.precision < 8:
        parser.error("--precision must be at least 8 bits")
    out = Output(args)
    try:
        return args.func(args, out)
    except RankDeficient as exc:
        print(f"rank-deficient: {exc}", file=sys.stderr)
        if exc.condition:
            print(f"violated condition: {exc.condition}", file=sys.stderr)
        return EXIT_RANK
    except (UsageError, DegenerateAlphas, InfeasibleParams, NonQuadraticAlpha, SquareInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AdelicError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
