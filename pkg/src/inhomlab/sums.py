"""Partial Kurzweil sums ``S_ell(x, y)`` truncated at ``N``, computed term by
term and through the record decomposition, plus heuristic divergence
diagnostics.

Three regimes share one kernel.  Writing ``||.||_*`` for the sup norm (plain,
sigma) or the weighted norm ``||.||_r`` (weighted), each term is
``(min_{ell<=m<=n} ||m x + y||_*) ** e`` with ``e = d`` (plain, weighted) or
``e = 1/sigma`` (sigma).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DimensionMismatch, DomainError
from .numeric import (Exponent, Rat, Real, TorusVector, Weights, as_vector,
                      compare, get_precision, interval, pow_ceil, pow_floor,
                      snapshot, torus_dist)
from .records import (NormPlan, RecordSequence, best_constant, orbit_keys,
                      plan_for, scan_precision, scan_records)


@dataclass(frozen=True)
class SumSpec:
    """Which sum: ``plain`` (exponent d), ``weighted`` (weighted norm, exponent
    d) or ``sigma`` (sup norm, exponent 1/sigma)."""

    regime: str = "plain"
    d: int | None = None
    weights: Weights | None = None
    sigma: Fraction | None = None

    def __post_init__(self):
        if self.regime not in ("plain", "weighted", "sigma"):
            raise DomainError(f"unknown regime {self.regime!r}")
        if self.regime == "weighted" and not isinstance(self.weights, Weights):
            if self.weights is None:
                raise DomainError("weighted regime needs weights")
            object.__setattr__(self, "weights", Weights(tuple(self.weights)))
        if self.regime == "sigma":
            if self.sigma is None:
                raise DomainError("sigma regime needs sigma")
            object.__setattr__(self, "sigma", Exponent(self.sigma).sigma)

    @classmethod
    def plain(cls, d: int | None = None) -> "SumSpec":
        return cls("plain", d=d)

    @classmethod
    def weighted(cls, r) -> "SumSpec":
        return cls("weighted", weights=r if isinstance(r, Weights) else Weights(tuple(r)))

    @classmethod
    def with_sigma(cls, sigma) -> "SumSpec":
        return cls("sigma", sigma=Fraction(sigma))

    @property
    def label(self) -> str:
        if self.regime == "plain":
            return "plain"
        if self.regime == "weighted":
            return "weighted(" + ",".join(str(r) for r in self.weights.r) + ")"
        return f"sigma({self.sigma})"

    def resolve(self, dim: int) -> tuple[NormPlan, Fraction]:
        """The record norm and the exponent applied to it, for dimension ``dim``."""
        if self.regime == "plain":
            if self.d is not None and self.d != dim:
                raise DimensionMismatch(f"plain regime with d={self.d} on {dim}-dimensional input")
            return plan_for(dim, None), Fraction(dim)
        if self.regime == "weighted":
            return plan_for(dim, self.weights), Fraction(dim)
        Exponent(self.sigma).check(dim)
        return plan_for(dim, None), 1 / self.sigma


def _prepare(x, y, ell, N, spec):
    x, y = as_vector(x), as_vector(y)
    if x.dim != y.dim:
        raise DimensionMismatch(f"x has dim {x.dim}, y has dim {y.dim}")
    if ell < 1 or N < ell:
        raise DomainError(f"need 1 <= ell <= N, got ell={ell}, N={N}")
    spec = spec or SumSpec.plain()
    plan, e = spec.resolve(x.dim)
    return x, y, spec, plan, e


def _sum_bits(N: int) -> int:
    return get_precision()[0] + N.bit_length() + 8


def partial_S(x, y, ell: int, N: int, spec: SumSpec | None = None) -> Real:
    """``sum_{n=ell}^{N} (min_{ell<=m<=n} ||m x + y||_*) ** e``.

    Exact for rational inputs whenever the per-term power is integral;
    otherwise an enclosure."""
    x, y, spec, plan, e = _prepare(x, y, ell, N, spec)
    snap = snapshot([x, y], scan_precision(N))
    den = plan.den(snap.scale)
    t = plan.norm_power * e
    exact_int = snap.exact and t.denominator == 1
    q = _sum_bits(N)
    acc_lo = acc_hi = 0
    cur_lo = cur_hi = None
    val_lo = val_hi = 0
    for lo, hi in orbit_keys(snap, plan, ell, N):
        changed = False
        if cur_lo is None or lo < cur_lo:
            cur_lo, changed = lo, True
        if cur_hi is None or hi < cur_hi:
            cur_hi, changed = hi, True
        if changed:
            if exact_int:
                val_lo = cur_lo ** t.numerator
            else:
                val_lo = pow_floor(cur_lo, den, t, q)
                val_hi = pow_ceil(cur_hi, den, t, q)
        acc_lo += val_lo
        acc_hi += val_hi
        if snap.exact and cur_hi == 0:
            break
    if exact_int:
        return Rat(Fraction(acc_lo, den ** t.numerator))
    return interval(Fraction(acc_lo, 1 << q), Fraction(acc_hi, 1 << q))


def _check_records(rs: RecordSequence, ell: int, N: int, plan: NormPlan):
    if rs.start != ell:
        raise DomainError(f"record sequence starts at {rs.start}, sum starts at ell={ell}")
    if rs.scan_bound < N and not rs.zero_hit:
        raise DomainError(f"insufficient scan bound {rs.scan_bound} < N={N}")
    if rs.plan != plan:
        raise DomainError(f"records were scanned with norm {rs.plan.label}, sum needs {plan.label}")


def _runs(rs: RecordSequence, N: int):
    """``(k, run_length)`` for each record ``t_k <= N``, the last run cut at N."""
    times = rs.times
    for k, t in enumerate(times):
        if t > N:
            return
        nxt = times[k + 1] if k + 1 < len(times) else N + 1
        yield k, min(nxt, N + 1) - t


def partial_S_records(rs: RecordSequence, ell: int, N: int,
                      spec: SumSpec | None = None) -> Real:
    """The same truncated sum as :func:`partial_S`, as
    ``sum_k delta_k ** e * (t_{k+1} - t_k)`` over the records."""
    spec = spec or SumSpec.plain()
    plan, e = spec.resolve(rs.x.dim)
    _check_records(rs, ell, N, plan)
    t = plan.norm_power * e
    if rs.exact and t.denominator == 1:
        den = rs.den
        acc = sum(rs.records[k].key_lo ** t.numerator * run for k, run in _runs(rs, N))
        return Rat(Fraction(acc, den ** t.numerator))
    q = _sum_bits(N)
    lo = hi = 0
    for k, run in _runs(rs, N):
        a, b = rs.power_bounds(k, e, q)
        lo += a * run
        hi += b * run
    return interval(Fraction(lo, 1 << q), Fraction(hi, 1 << q))


def record_increments(rs: RecordSequence, N: int, spec: SumSpec | None = None
                      ) -> list[tuple[int, Real]]:
    """``delta_k ** e * (t_{k+1} - t_k)`` for every complete run ending by N."""
    spec = spec or SumSpec.plain()
    plan, e = spec.resolve(rs.x.dim)
    times = rs.times
    out = []
    for k in range(len(times) - 1):
        if times[k + 1] > N:
            break
        exact = rs.exact_power(k, e)
        power = Rat(exact) if exact is not None else rs.delta(k) ** e
        out.append((k + 1, power * (times[k + 1] - times[k])))
    return out


@dataclass
class SumReport:
    """Partial sums along a schedule with a verdict.

    ``verdict_hint`` is one of ``diverging``, ``converging``,
    ``inconclusive``.  It is a proof only when ``exact`` is True (rational
    inputs or an exact zero hit); otherwise it is a heuristic signature.
    """

    regime: str
    ell: int
    partial_sums: list
    per_record_increments: list
    verdict_hint: str
    exact: bool = False
    certificate: dict | None = None
    notes: list = field(default_factory=list)


@dataclass(frozen=True)
class DiagnosticSettings:
    divergence_fraction: Fraction = Fraction(1, 2)
    burn_in: int = 3
    min_tail: int = 3
    window: int = 5
    tolerance: Fraction = Fraction(1, 10 ** 9)
    ratio: Fraction = Fraction(1, 2)


def _geometric_tail(partials, settings: DiagnosticSettings) -> bool:
    mids = []
    for _, v in partials:
        if v.exact is not None:
            mids.append(v.exact)
        else:
            lo, hi = v.enclose(64)
            mids.append((lo + hi) / 2)
    incs = [b - a for a, b in zip(mids, mids[1:])]
    if len(incs) < settings.window:
        return False
    tail = incs[-settings.window:]
    if any(i >= settings.tolerance for i in tail):
        return False
    return all(b <= settings.ratio * a for a, b in zip(tail, tail[1:]))


def divergence_diagnostic(x, y, ell: int, schedule, spec: SumSpec | None = None,
                          settings: DiagnosticSettings | None = None) -> SumReport:
    """Partial sums of ``S_ell`` along ``schedule`` and a verdict.

    Exact verdicts: an exact zero hit (the sum is finite and equals its
    value at the hit), or rational ``x, y`` (finite iff ``Z x + y`` meets
    ``Z^d``).  Heuristic "diverging": every record increment past the
    burn-in is at least ``fraction * c / 2**e`` with ``c = min n ||n x||^e``.
    Heuristic "converging": the last ``window`` schedule increments are below
    ``tolerance`` and each at most ``ratio`` times the previous one.
    """
    settings = settings or DiagnosticSettings()
    schedule = [int(n) for n in schedule]
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise DomainError("schedule must be a non-empty increasing list")
    x, y, spec, plan, e = _prepare(x, y, ell, schedule[-1], spec)
    if schedule[0] < ell:
        raise DomainError(f"schedule starts below ell={ell}")
    rs = scan_records(x, y, schedule[-1], start=ell, weights=plan.weights)
    partials = [(n, partial_S_records(rs, ell, n, spec)) for n in schedule]
    increments = record_increments(rs, schedule[-1], spec)
    report = SumReport(spec.label, ell, partials, increments, "inconclusive")

    if rs.zero_hit:
        t0 = rs.records[-1].t
        report.verdict_hint, report.exact = "converging", True
        report.certificate = {"kind": "converged exactly", "zero_at": t0,
                              "value": partial_S_records(rs, ell, t0, spec)}
        return report
    if x.exact is not None and y.exact is not None:
        from .rational import RationalPair, contains_integer_point
        hit = contains_integer_point(RationalPair(x.exact, y.exact))
        report.exact = True
        if hit.found:
            n0 = hit.least_n
            if n0 < ell:
                n0 += -(-(ell - n0) // hit.modulus) * hit.modulus
            report.verdict_hint = "converging"
            report.certificate = {"kind": "integer point", "zero_at": n0,
                                  "modulus": hit.modulus}
        else:
            report.verdict_hint = "diverging"
            report.certificate = {"kind": "orbit bounded below",
                                  "min_dist": min(torus_dist(_orbit(x, y, n)).exact
                                                  for n in range(1, _period(x) + 1))}
        return report

    tail = increments[settings.burn_in:]
    if len(tail) >= settings.min_tail:
        _, c = best_constant(x, schedule[-1], exponent=e, weights=plan.weights)
        threshold = settings.divergence_fraction * c / (Rat(2) ** e)
        report.notes.append(f"c = {float(c):.6g}")
        if c.exact != 0 and all(compare(inc, threshold) >= 0 for _, inc in tail):
            report.verdict_hint = "diverging"
            report.certificate = {"kind": "hint", "threshold": threshold,
                                  "tail_records": len(tail)}
            return report
    if _geometric_tail(partials, settings):
        report.verdict_hint = "converging"
        report.certificate = {"kind": "hint", "tolerance": settings.tolerance}
    return report


def _orbit(x: TorusVector, y: TorusVector, n: int) -> TorusVector:
    from .numeric import affine_orbit_point
    return affine_orbit_point(x, y, n)


def _period(x: TorusVector) -> int:
    import math
    return math.lcm(*(c.denominator for c in x.exact))
