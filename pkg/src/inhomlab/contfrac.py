"""Continued fractions for d = 1: expansions, convergents, and generators of
badly approximable (bounded quotient) and Liouville-type numbers."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .errors import DomainError
from .numeric import Rat, Real, Undecided, as_real, refine


@dataclass(frozen=True)
class ContinuedFraction:
    """``[a0; a1, a2, ...]`` given as a finite prefix, an optional repeating
    period, or a rule ``i -> a_i`` for the indices after the prefix.

    ``complete`` is False for a truncated prefix of a longer expansion.
    """

    a0: int
    prefix: tuple = ()
    period: tuple | None = None
    rule: Callable[[int], int] | None = field(default=None, compare=False)
    rule_name: str | None = None
    complete: bool = True

    def __post_init__(self):
        object.__setattr__(self, "a0", int(self.a0))
        object.__setattr__(self, "prefix", tuple(int(a) for a in self.prefix))
        if self.period is not None:
            period = tuple(int(a) for a in self.period)
            if not period:
                raise DomainError("empty period")
            object.__setattr__(self, "period", period)
        if self.period is not None and self.rule is not None:
            raise DomainError("a continued fraction has either a period or a rule")
        for a in self.prefix + (self.period or ()):
            if a < 1:
                raise DomainError(f"partial quotients must be >= 1, got {a}")

    @classmethod
    def finite(cls, terms, canonical: bool = True) -> "ContinuedFraction":
        terms = [int(a) for a in terms]
        if not terms:
            raise DomainError("empty continued fraction")
        if canonical and len(terms) > 1 and terms[-1] == 1:
            terms = terms[:-2] + [terms[-2] + 1]
        return cls(terms[0], tuple(terms[1:]), complete=canonical)

    @property
    def is_finite(self) -> bool:
        return self.period is None and self.rule is None

    def quotient(self, i: int) -> int | None:
        if i == 0:
            return self.a0
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        if self.period is not None:
            return self.period[(i - len(self.prefix) - 1) % len(self.period)]
        if self.rule is not None:
            a = int(self.rule(i))
            if a < 1:
                raise DomainError(f"rule produced a_{i} = {a} < 1")
            return a
        return None

    def __iter__(self) -> Iterator[int]:
        for i in itertools.count():
            a = self.quotient(i)
            if a is None:
                return
            yield a

    def terms(self, count: int) -> list[int]:
        return list(itertools.islice(iter(self), count))

    @property
    def value(self) -> Real:
        return ContFracReal(self)

    def literal(self, count: int | None = None) -> str:
        """Render in the ``cf:[a0;a1,(b1,...)]`` grammar; rule-generated
        expansions are rendered as their first ``count`` terms."""
        if self.rule is not None or (count is not None and not self.is_finite):
            ts = self.terms(count or 20)
            return "cf:[" + str(ts[0]) + (";" + ",".join(map(str, ts[1:])) if len(ts) > 1 else "") + ",...]"
        body = ",".join(map(str, self.prefix))
        if self.period is not None:
            body = (body + "," if body else "") + "(" + ",".join(map(str, self.period)) + ")"
        return f"cf:[{self.a0}" + (f";{body}" if body else "") + "]"


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    index: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


def _convergent_stream(cf: ContinuedFraction) -> Iterator[tuple[int, int]]:
    p_prev, q_prev, p, q = 1, 0, cf.a0, 1
    yield p, q
    for a in itertools.islice(cf, 1, None):
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
        yield p, q


class ContFracReal(Real):
    """The value of a continued fraction, enclosed between consecutive
    convergents."""

    __slots__ = ("cf", "_exact")

    def __init__(self, cf: ContinuedFraction):
        object.__setattr__(self, "cf", cf)
        exact = None
        if cf.is_finite:
            p, q = 0, 1
            for p, q in _convergent_stream(cf):
                pass
            exact = Fraction(p, q)
        object.__setattr__(self, "_exact", exact)

    def __setattr__(self, *_):
        raise AttributeError("ContFracReal is immutable")

    @property
    def exact(self):
        return self._exact

    @property
    def ident(self):
        cf = self.cf
        if cf.rule is not None:
            return ("cf-rule", cf.a0, cf.prefix, cf.rule_name or id(cf.rule))
        return ("cf", cf.a0, cf.prefix, cf.period)

    def enclose(self, prec):
        if self._exact is not None:
            return self._exact, self._exact
        target = 1 << prec
        stream = _convergent_stream(self.cf)
        p0, q0 = next(stream)
        for p1, q1 in stream:
            if q0 * q1 >= target:
                a, b = Fraction(p0, q0), Fraction(p1, q1)
                return min(a, b), max(a, b)
            p0, q0 = p1, q1
        raise AssertionError("infinite expansion ended")

    def __repr__(self):
        return f"ContFracReal({self.cf.literal(8)})"


def golden_ratio() -> Real:
    return ContinuedFraction(1, (), (1,)).value


def sqrt2() -> Real:
    return ContinuedFraction(1, (), (2,)).value


def cf_expand(x, count: int) -> ContinuedFraction:
    """First ``count`` terms (``a0`` included) of the expansion of ``x``,
    each certified by interval arithmetic.  Rationals terminate in canonical
    form (last quotient >= 2)."""
    if count < 1:
        raise DomainError("count must be positive")
    x = as_real(x)
    if isinstance(x, ContFracReal) and not x.cf.is_finite:
        return ContinuedFraction.finite(x.cf.terms(count), canonical=False)
    e = x.exact
    if e is not None:
        terms = []
        while len(terms) < count:
            a = math.floor(e)
            terms.append(a)
            e -= a
            if e == 0:
                return ContinuedFraction.finite(terms)
            e = 1 / e
        return ContinuedFraction.finite(terms, canonical=False)

    def attempt(p):
        lo, hi = x.enclose(p)
        terms = []
        while len(terms) < count:
            a = math.floor(lo)
            if math.floor(hi) != a:
                break
            terms.append(a)
            lo, hi = lo - a, hi - a
            if lo <= 0:
                break
            lo, hi = 1 / hi, 1 / lo
        if len(terms) < count:
            raise Undecided(("cf_expand", len(terms)))
        return terms
    return ContinuedFraction.finite(refine(attempt, what="continued fraction expansion"),
                                    canonical=False)


def convergents(cf: ContinuedFraction, count: int) -> list[Convergent]:
    out = [Convergent(p, q, i) for i, (p, q) in
           enumerate(itertools.islice(_convergent_stream(cf), count))]
    if len(out) < count:
        raise DomainError(f"expansion has only {len(out)} terms, {count} requested")
    return out


def make_bounded_quotient(bound: int, rule="constant", a0: int = 0,
                          prefix=()) -> ContinuedFraction:
    """An infinite expansion whose quotients after ``prefix`` are all <= bound.

    ``rule`` is ``"constant"`` (every quotient equals ``bound``), ``"cycle"``
    (``1, 2, ..., bound`` repeating; ``"alternating"`` is an alias) or a
    callable ``i -> a_i``.  The prefix is exempt from the bound so that the
    eventually-constant shapes ``[a0; a1, ..., aM, 1, 1, ...]`` are expressible.
    """
    bound = int(bound)
    if bound < 1:
        raise DomainError("bound must be >= 1")
    if rule == "constant":
        return ContinuedFraction(a0, tuple(prefix), (bound,))
    if rule in ("cycle", "alternating"):
        return ContinuedFraction(a0, tuple(prefix), tuple(range(1, bound + 1)))
    if callable(rule):
        def checked(i, rule=rule):
            a = int(rule(i))
            if not 1 <= a <= bound:
                raise DomainError(f"rule produced a_{i} = {a}, outside [1, {bound}]")
            return a
        return ContinuedFraction(a0, tuple(prefix), rule=checked,
                                 rule_name=f"bounded:{bound}:{getattr(rule, '__name__', id(rule))}")
    raise DomainError(f"unknown rule {rule!r}")


_SCHEDULES = {
    "factorial": math.factorial,
    "pow2": lambda j: 2 ** j,
    "square": lambda j: j * j,
    "linear": lambda j: j,
}


class LiouvilleReal(Real):
    """``x = sum_{j>=1} 2**-g(j)`` with its designated denominators
    ``n_j = 2**g(j)``."""

    __slots__ = ("name", "g")

    def __init__(self, name: str, g: Callable[[int], int]):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "g", g)

    def __setattr__(self, *_):
        raise AttributeError("LiouvilleReal is immutable")

    @property
    def ident(self):
        return ("liouville", self.name)

    def enclose(self, prec):
        total = Fraction(0)
        for j in itertools.count(1):
            gj = self.g(j)
            if gj > prec + 1:
                break
            total += Fraction(1, 1 << gj)
        # tail < 2 * 2**-g(J) <= 2**-(prec+1)
        return total, total + Fraction(1, 1 << (prec + 1))

    def denominators(self, count: int) -> list[int]:
        return [1 << self.g(j) for j in range(1, count + 1)]

    def distance_bound(self, j: int) -> Fraction:
        """Upper bound on ``||2**g(j) x||``."""
        return Fraction(2, 1) / (1 << (self.g(j + 1) - self.g(j)))

    def __repr__(self):
        return f"LiouvilleReal({self.name})"


def make_liouville(schedule) -> LiouvilleReal:
    """Build ``sum_j 2**-g(j)`` for a strictly increasing schedule whose gaps
    ``g(j+1) - g(j)`` strictly increase (checked on the first eight terms).

    ``schedule`` is one of ``"factorial"``, ``"pow2"``, ``"square"``,
    ``"linear"`` or a ``(name, callable)`` pair.
    """
    if isinstance(schedule, str):
        if schedule not in _SCHEDULES:
            raise DomainError(f"unknown schedule {schedule!r}")
        name, g = schedule, _SCHEDULES[schedule]
    else:
        name, g = schedule
    vals = [int(g(j)) for j in range(1, 9)]
    if vals[0] < 1 or any(b <= a for a, b in zip(vals, vals[1:])):
        raise DomainError("schedule must be positive and strictly increasing")
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    if any(b <= a for a, b in zip(gaps, gaps[1:])):
        raise DomainError(f"schedule {name!r} too slow: gaps {gaps[:4]}... do not grow")
    return LiouvilleReal(name, lambda j, g=g: int(g(j)))
