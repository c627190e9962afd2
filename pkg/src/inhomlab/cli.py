"""``inhomlab`` command line: one subcommand per module, JSON or CSV on stdout.

Exit codes: 0 success, 2 literal/argument errors, 3 precision ceiling
reached, 4 domain errors.  In JSON mode errors are reported as an object on
stdout as well as through the exit code.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .contfrac import cf_expand, convergents
from .errors import DomainError, InhomError, LiteralParseError, PrecisionExhausted
from .literals import parse_fraction, parse_number, parse_vector, split_top
from .numeric import (DEFAULT_CEILING, Real, Weights, format_real, get_precision,
                      working_precision)
from .schemas import SCHEMA_VERSION

DIGITS = 30


def value_str(v: Real, digits: int = DIGITS) -> str:
    """Exact values as ``p/q`` (or an integer); enclosures as
    ``dec:mid~radius`` with the radius rounded up to cover the printed mid."""
    e = v.exact
    if e is not None:
        return str(e)
    lo, hi = v.enclose(max(get_precision()[0], 4 * digits))
    mid = Fraction(format_real(v, digits))
    rad = max(hi - mid, mid - lo)
    return f"dec:{format_real(v, digits)}~{_sci_up(rad)}"


def _sci_up(r: Fraction) -> str:
    if r <= 0:
        return "0"
    exp = 0
    while r * 10 ** exp < 1:
        exp += 1
    while r * 10 ** exp >= 10:
        exp -= 1
    mant = -(-(r * 10 ** (exp + 2)) // 1)
    if mant >= 1000:
        mant, exp = -(-mant // 10), exp - 1
    return f"{mant / 100:.2f}e{-exp:+d}"


def _vec_strs(v) -> list[str]:
    return [value_str(c) for c in v.coords]


def _exact_str(f) -> str | None:
    return None if f is None else str(f)


# -- argument helpers -----------------------------------------------------------

def _weights(text):
    if text is None:
        return None
    try:
        return Weights(tuple(parse_fraction(t) for t in split_top(text)))
    except DomainError as exc:
        raise LiteralParseError(str(exc)) from exc


def _schedule(text):
    if text is None:
        return None
    try:
        return [int(t) for t in split_top(text)]
    except ValueError as exc:
        raise LiteralParseError(f"bad schedule {text!r}") from exc


def _sum_spec(args):
    from .sums import SumSpec
    if args.weights is not None and args.sigma is not None:
        raise DomainError("--weights and --sigma are mutually exclusive")
    if args.weights is not None:
        return SumSpec.weighted(_weights(args.weights))
    if args.sigma is not None:
        return SumSpec.with_sigma(parse_fraction(args.sigma))
    return SumSpec.plain(args.d)


# -- commands -------------------------------------------------------------------

def cmd_records(args):
    from .records import scan_records
    x, y = parse_vector(args.x), parse_vector(args.y)
    rs = scan_records(x, y, args.N, start=args.ell, weights=_weights(args.weights),
                      jobs=args.jobs)
    rows = []
    for k, rec in enumerate(rs.records):
        d = rs.delta(k)
        rows.append({"t": rec.t, "delta": value_str(d), "delta_exact": _exact_str(d.exact)})
    if args.format == "csv":
        return _csv(["t", "delta", "delta_exact"],
                    [[r["t"], r["delta"], r["delta_exact"] or ""] for r in rows])
    return {"x": _vec_strs(x), "y": _vec_strs(y), "start": args.ell, "N": args.N,
            "norm": rs.plan.label, "zero_hit": rs.zero_hit, "records": rows}


def _jsonable(obj):
    if isinstance(obj, Real):
        return value_str(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def cmd_sum(args):
    from .sums import divergence_diagnostic, partial_S
    x, y = parse_vector(args.x), parse_vector(args.y)
    spec = _sum_spec(args)
    schedule = _schedule(args.schedule)
    if schedule is None:
        if args.N is None:
            raise DomainError("sum needs --N or --schedule")
        value = partial_S(x, y, args.ell, args.N, spec)
        out = {"regime": spec.label, "ell": args.ell, "partials": [[args.N, value_str(value)]],
               "increments": [], "verdict": "inconclusive", "exact": value.exact is not None,
               "certificate": None}
    else:
        rep = divergence_diagnostic(x, y, args.ell, schedule, spec)
        out = {"regime": rep.regime, "ell": rep.ell,
               "partials": [[n, value_str(v)] for n, v in rep.partial_sums],
               "increments": [[k, value_str(v)] for k, v in rep.per_record_increments],
               "verdict": rep.verdict_hint, "exact": rep.exact,
               "certificate": _jsonable(rep.certificate)}
    if args.format == "csv":
        return _csv(["N", "value"], out["partials"])
    return out


def cmd_psi(args):
    from .psi import (discretize_reciprocal, divergence_check_D, membership_W,
                      parse_psi, transform_contract, transform_dilate)
    psi = parse_psi(args.psi)
    if args.contract:
        psi = transform_contract(psi, args.contract)
    if args.dilate:
        psi = transform_dilate(psi, args.dilate)
    shown = min(args.N or 10, 20)
    out = {"psi": psi.literal(), "values": [value_str(v) for v in psi.values(shown)],
           "members": None, "discretized": None, "divergence": None}
    if args.x is not None:
        if args.N is None:
            raise DomainError("membership scan needs --N")
        y = parse_vector(args.y) if args.y is not None else None
        x = parse_vector(args.x)
        if y is None:
            raise DomainError("membership scan needs --y")
        out["members"] = membership_W(x, y, psi, args.N)
    if args.discretize:
        out["discretized"] = list(discretize_reciprocal(psi, args.discretize).k)
    schedule = _schedule(args.schedule)
    if schedule is not None:
        rep = divergence_check_D(psi, Fraction(args.d or 1), schedule)
        out["divergence"] = {"d": str(rep.e), "verdict": rep.verdict, "status": rep.status,
                             "partials": [[n, value_str(v)] for n, v in rep.partial_sums]}
    if args.format == "csv":
        return _csv(["n", "psi"], [[i + 1, v] for i, v in enumerate(out["values"])])
    return out


def _source(text):
    from .witness import Scan
    if text == "designated":
        return text
    kind, _, body = text.partition(":")
    if kind == "scan":
        try:
            return Scan(int(body))
        except ValueError as exc:
            raise LiteralParseError(f"bad scan bound in {text!r}") from exc
    if kind == "list":
        try:
            return [int(t) for t in split_top(body)]
        except ValueError as exc:
            raise LiteralParseError(f"bad candidate list {text!r}") from exc
    raise LiteralParseError(f"unknown source {text!r} (designated, scan:B, list:n1,n2,...)")


def cmd_witness(args):
    from .witness import build_witness, select_subsequence, verify_witness
    x = parse_vector(args.x)
    seq = select_subsequence(x, _source(args.source), args.K, parse_fraction(args.rho),
                             parse_fraction(args.C))
    cert = build_witness(x, seq, args.K)
    out = cert.to_json()
    out["verification"] = None
    if args.N is not None:
        rep = verify_witness(cert, args.ell, args.N)
        out["verification"] = {"ell": args.ell, "N": args.N, "verdict": rep.verdict_hint,
                               "partial": value_str(rep.partial_sums[0][1]),
                               "majorant": value_str(rep.certificate["majorant"]),
                               "precision": rep.certificate["precision"]}
    if args.format == "csv":
        return _csv(["k", "n", "a"], [[k, n, " ".join(map(str, a))]
                                      for k, (n, a) in enumerate(zip(out["n"], out["a"]))])
    return out


def _rational_row(pair):
    from .rational import contains_integer_point, orbit_summary
    hit = contains_integer_point(pair)
    summ = orbit_summary(pair)
    return hit, summ


def _sweep_row(args):
    x, y = args
    from .rational import RationalPair
    hit, summ = _rational_row(RationalPair((x,), (y,)))
    return [str(x), str(y), str(hit.found).lower(),
            hit.least_n if hit.found else "", summ.period, str(summ.min_dist)]


def _grid(max_den):
    """All pairs of reduced fractions in [0, 1) with denominators <= max_den."""
    fracs = sorted({Fraction(p, q) for q in range(1, max_den + 1) for p in range(q)})
    return [(x, y) for x in fracs for y in fracs]


def cmd_rational(args):
    from .rational import RationalPair, phi_membership_rational, s_finite
    if args.max_den is not None:
        grid = _grid(args.max_den)
        if args.sample is not None:
            rng = random.Random(args.seed)
            grid = [grid[i] for i in sorted(rng.sample(range(len(grid)), min(args.sample, len(grid))))]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as ex:
                rows = list(ex.map(_sweep_row, grid, chunksize=512))
        else:
            rows = [_sweep_row(g) for g in grid]
        header = ["x", "y", "contains_integer", "least_n", "period", "min_dist"]
        if args.format == "csv":
            return _csv(header, rows)
        return {"command": "rational", "sweep": [dict(zip(header, r)) for r in rows]}
    x, y = parse_vector(args.x), parse_vector(args.y)
    if x.exact is None or y.exact is None:
        raise DomainError("rational needs exact rational coordinates")
    pair = RationalPair(x.exact, y.exact)
    hit, summ = _rational_row(pair)
    out = {"x": [str(v) for v in pair.x], "y": [str(v) for v in pair.y],
           "contains_integer": hit.found, "least_n": hit.least_n, "modulus": hit.modulus,
           "period": summ.period, "min_dist": str(summ.min_dist),
           "s_finite": s_finite(pair, args.ell), "membership": phi_membership_rational(pair).value}
    if args.format == "csv":
        return _csv(["x", "y", "contains_integer", "least_n", "period", "min_dist"],
                    [[" ".join(out["x"]), " ".join(out["y"]), str(hit.found).lower(),
                      hit.least_n or "", summ.period, out["min_dist"]]])
    return out


def cmd_cf(args):
    x = parse_number(args.x)
    cf = cf_expand(x, args.count)
    terms = cf.terms(args.count)
    convs = convergents(cf, len(terms))
    out = {"x": value_str(x), "terms": terms, "complete": cf.complete,
           "convergents": [[c.p, c.q] for c in convs], "literal": cf.literal()}
    if args.format == "csv":
        return _csv(["i", "a", "p", "q"], [[i, a, c.p, c.q] for i, (a, c) in enumerate(zip(terms, convs))])
    return out


# -- plumbing -------------------------------------------------------------------

class _CsvText(str):
    pass


def _csv(header, rows) -> _CsvText:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return _CsvText(buf.getvalue())


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise LiteralParseError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help="starting precision in bits (doubled on demand)")
    common.add_argument("--max-precision", type=int, default=None,
                        help=f"precision ceiling in bits (default {DEFAULT_CEILING})")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="inhomlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("records", parents=[common], help="best inhomogeneous approximations")
    r.add_argument("--x", required=True)
    r.add_argument("--y", required=True)
    r.add_argument("--N", type=int, required=True)
    r.add_argument("--ell", type=int, default=1, help="first time scanned")
    r.add_argument("--weights")
    r.set_defaults(fn=cmd_records)

    s = sub.add_parser("sum", parents=[common], help="partial Kurzweil sums")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--ell", type=int, default=1)
    s.add_argument("--N", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--weights")
    s.add_argument("--sigma")
    s.add_argument("--schedule", help="comma separated N values; enables the diagnostic")
    s.set_defaults(fn=cmd_sum)

    q = sub.add_parser("psi", parents=[common], help="rate functions")
    q.add_argument("--psi", required=True)
    q.add_argument("--x")
    q.add_argument("--y")
    q.add_argument("--N", type=int)
    q.add_argument("--d")
    q.add_argument("--schedule")
    q.add_argument("--discretize", type=int, metavar="PREFIX")
    q.add_argument("--contract", type=int, metavar="U")
    q.add_argument("--dilate", type=int, metavar="V")
    q.set_defaults(fn=cmd_psi)

    w = sub.add_parser("witness", parents=[common], help="witness certificates")
    w.add_argument("--x", required=True)
    w.add_argument("--source", default="designated")
    w.add_argument("--K", type=int, default=5)
    w.add_argument("--rho", default="1/2")
    w.add_argument("--C", default="1")
    w.add_argument("--ell", type=int, default=1)
    w.add_argument("--N", type=int, help="verify the certificate up to N")
    w.set_defaults(fn=cmd_witness)

    a = sub.add_parser("rational", parents=[common], help="exact rational decisions")
    a.add_argument("--x")
    a.add_argument("--y")
    a.add_argument("--ell", type=int, default=1)
    a.add_argument("--max-den", type=int, help="sweep the d=1 grid up to this denominator")
    a.add_argument("--sample", type=int, help="random sample size from the sweep grid")
    a.set_defaults(fn=cmd_rational)

    c = sub.add_parser("cf", parents=[common], help="continued fraction expansion")
    c.add_argument("--x", required=True)
    c.add_argument("--count", type=int, default=10)
    c.set_defaults(fn=cmd_cf)
    return p


_EXIT = ((LiteralParseError, 2), (PrecisionExhausted, 3), (DomainError, 4))


def _exit_code(exc) -> int:
    for cls, code in _EXIT:
        if isinstance(exc, cls):
            return code
    return 4


def _validate(args):
    for name in ("N", "ell", "K", "count", "max_den", "sample", "discretize",
                 "contract", "dilate", "precision", "max_precision", "jobs"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            raise DomainError(f"--{name.replace('_', '-')} must be positive")
    if args.command == "rational" and args.max_den is None and (args.x is None or args.y is None):
        raise DomainError("rational needs --x and --y, or --max-den")


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    fmt = "json"
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        _validate(args)
        with working_precision(args.precision, args.max_precision):
            result = args.fn(args)
    except InhomError as exc:
        code = _exit_code(exc)
        err = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
        contested = getattr(exc, "contested", None)
        if contested is not None:
            err["contested"] = _jsonable(list(contested) if isinstance(contested, tuple) else contested)
        if fmt == "json":
            out.write(json.dumps({"schema_version": SCHEMA_VERSION, "error": err}) + "\n")
        else:
            sys.stderr.write(f"inhomlab: {err['type']}: {err['message']}\n")
        return code
    if isinstance(result, _CsvText):
        out.write(result)
    else:
        body = {"schema_version": SCHEMA_VERSION, "command": args.command}
        body.update(result)
        out.write(json.dumps(body) + "\n")
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
