"""Non-increasing rate functions ``psi: N -> R_{>=0}``: symbolic forms, the
killer function built from an orbit's running minimum, reciprocal
discretization, integer contractions and dilations, powers, and scans for
``||n x + y|| < psi(n)``."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DimensionMismatch, DomainError, LiteralParseError
from .numeric import (Rat, Real, Undecided, as_real, as_vector, ceil_real,
                      compare, exact_root, get_precision, interval, refine, torus_dist,
                      affine_orbit_point, try_compare)

EXACT_DIVERGES = "exact-diverges"
EXACT_CONVERGES = "exact-converges"
HINT = "hint"


class PsiSpec:
    """Base class.  Subclasses implement :meth:`value` for ``n >= 1``."""

    form = "abstract"

    def __call__(self, n: int) -> Real:
        n = int(n)
        if n < 1:
            raise DomainError(f"psi is defined on positive integers, got {n}")
        return self.value(n)

    def value(self, n: int) -> Real:
        raise NotImplementedError

    def literal(self) -> str:
        raise NotImplementedError

    def exact_verdict(self, e: Fraction) -> str | None:
        """``EXACT_DIVERGES``/``EXACT_CONVERGES`` for ``sum psi(n)**e`` when
        the form decides it, else None."""
        return None

    def values(self, N: int) -> list[Real]:
        return [self(n) for n in range(1, N + 1)]

    def check_prefix(self, N: int) -> None:
        """Certify ``0 <= psi(n+1) <= psi(n)`` for ``n < N``."""
        prev = None
        for n in range(1, N + 1):
            v = self(n)
            if compare(v, 0, contested=n) < 0:
                raise DomainError(f"psi({n}) < 0")
            if prev is not None and compare(v, prev, contested=n) > 0:
                raise DomainError(f"psi increases at n={n}")
            prev = v

    # symbolic transforms, overridden where a closed form exists
    def contract(self, u: int) -> "PsiSpec":
        return Contract(self, u)

    def dilate(self, v: int) -> "PsiSpec":
        return Dilate(self, v)

    def power(self, t: Fraction) -> "PsiSpec":
        return Power(self, t)

    def __repr__(self):
        return f"PsiSpec({self.literal()})"


def _nonneg_rational(v, what: str) -> Fraction:
    v = Fraction(v)
    if v < 0:
        raise DomainError(f"{what} must be non-negative")
    return v


def _render(v: Real) -> str:
    e = v.exact
    if e is not None:
        return str(e)
    from .numeric import format_real
    return "dec:" + format_real(v, 30)


class Table(PsiSpec):
    """Finite table ``psi(1..L)`` extended by its last value."""

    form = "table"

    def __init__(self, values):
        vals = tuple(as_real(v) for v in values)
        if not vals:
            raise DomainError("empty psi table")
        for i, v in enumerate(vals):
            if compare(v, 0, contested=i + 1) < 0:
                raise DomainError(f"psi({i + 1}) < 0")
            if i and compare(v, vals[i - 1], contested=i + 1) > 0:
                raise DomainError(f"table increases at n={i + 1}")
        self.table = vals

    def value(self, n):
        return self.table[min(n, len(self.table)) - 1]

    def literal(self):
        if len(self.table) == 1:
            return "const:" + _render(self.table[0])
        return "table:[" + ",".join(_render(v) for v in self.table) + "]"

    def exact_verdict(self, e):
        last = self.table[-1]
        return EXACT_CONVERGES if compare(last, 0) == 0 else EXACT_DIVERGES

    def _reindex(self, step, scale=None):
        L = len(self.table)
        size = -(-L // step)
        vals = [self.value(step * n) for n in range(1, size + 1)]
        if scale is not None:
            vals = [v * scale for v in vals]
        return Table(vals)

    def contract(self, u):
        u = _positive(u, "u")
        return self._reindex(u, Fraction(1, u))

    def dilate(self, v):
        return self._reindex(_positive(v, "v"))

    def power(self, t):
        t = _exponent(t)
        return Table([v ** t for v in self.table])


class PowerLaw(PsiSpec):
    """``c * n**(-alpha)`` with ``c >= 0`` and rational ``alpha >= 0``.

    When ``c`` is a product of rational powers (as after contraction or
    powering) those factors are kept, so values that happen to be rational
    come out exact."""

    form = "power-law"

    def __init__(self, c, alpha, *, factors=None):
        self.c = as_real(c)
        if compare(self.c, 0) < 0:
            raise DomainError("c must be non-negative")
        self.alpha = _nonneg_rational(alpha, "alpha")
        if factors is None and self.c.exact is not None:
            factors = ((self.c.exact, Fraction(1)),)
        self.factors = factors

    def value(self, n):
        if self.factors is not None:
            exps = [e for _, e in self.factors] + [self.alpha]
            Q = math.lcm(*(e.denominator for e in exps))
            power_Q = Fraction(n) ** int(-self.alpha * Q)
            for b, e in self.factors:
                power_Q *= b ** int(e * Q)
            v = exact_root(power_Q, Fraction(1, Q))
            if v is not None:
                return Rat(v)
        if self.alpha == 0:
            return self.c
        return self.c * Rat(n) ** (-self.alpha)

    def literal(self):
        return f"pow:{_render(self.c)},{self.alpha}"

    def exact_verdict(self, e):
        if compare(self.c, 0) == 0:
            return EXACT_CONVERGES
        return EXACT_DIVERGES if self.alpha * e <= 1 else EXACT_CONVERGES

    def _scaled(self, k: int, alpha_shift: int):
        """``c * k**(-alpha - alpha_shift)`` as a new power law constant."""
        c = self.c * Rat(k) ** (-self.alpha) / (k ** alpha_shift)
        fs = None
        if self.factors is not None:
            fs = self.factors + ((Fraction(k), -self.alpha - alpha_shift),)
        return c, fs

    def contract(self, u):
        c, fs = self._scaled(_positive(u, "u"), 1)
        return PowerLaw(c, self.alpha, factors=fs)

    def dilate(self, v):
        c, fs = self._scaled(_positive(v, "v"), 0)
        return PowerLaw(c, self.alpha, factors=fs)

    def power(self, t):
        t = _exponent(t)
        fs = None if self.factors is None else tuple((b, e * t) for b, e in self.factors)
        return PowerLaw(self.c ** t, self.alpha * t, factors=fs)


class ReciprocalSeq(PsiSpec):
    """``psi(n) = 1/k_n`` for a non-decreasing positive integer sequence,
    extended by its last value."""

    form = "reciprocal"

    def __init__(self, k):
        k = tuple(int(v) for v in k)
        if not k:
            raise DomainError("empty reciprocal sequence")
        if any(v < 1 for v in k):
            raise DomainError("k_n must be positive integers")
        if any(b < a for a, b in zip(k, k[1:])):
            raise DomainError("k must be non-decreasing")
        self.k = k

    def value(self, n):
        return Rat(Fraction(1, self.k[min(n, len(self.k)) - 1]))

    def literal(self):
        return "recip:[" + ",".join(map(str, self.k)) + "]"

    def exact_verdict(self, e):
        return EXACT_DIVERGES

    def contract(self, u):
        u = _positive(u, "u")
        size = -(-len(self.k) // u)
        return ReciprocalSeq(u * self.k[min(u * n, len(self.k)) - 1] for n in range(1, size + 1))

    def dilate(self, v):
        v = _positive(v, "v")
        size = -(-len(self.k) // v)
        return ReciprocalSeq(self.k[min(v * n, len(self.k)) - 1] for n in range(1, size + 1))


class Killer(PsiSpec):
    """``psi(n) = min_{ell <= m <= n} ||m x + y||`` for ``n >= ell`` and
    ``psi(ell)`` below ``ell``.  Record scans are cached and doubled on demand."""

    form = "killer"

    def __init__(self, x, y, ell: int):
        self.x, self.y = as_vector(x), as_vector(y)
        if self.x.dim != self.y.dim:
            raise DimensionMismatch(f"x has dim {self.x.dim}, y has dim {self.y.dim}")
        if int(ell) < 1:
            raise DomainError("ell must be a positive integer")
        self.ell = int(ell)
        self._rs = None

    def _records(self, n):
        from .records import scan_records
        rs = self._rs
        if rs is None or (rs.scan_bound < n and not rs.zero_hit):
            bound = max(n, 2 * rs.scan_bound if rs else 64, self.ell)
            rs = scan_records(self.x, self.y, bound, start=self.ell)
            self._rs = rs
        return rs

    def value(self, n):
        n = max(n, self.ell)
        rs = self._records(n)
        k = bisect.bisect_right(rs.times, n) - 1
        return rs.delta(k)

    def literal(self):
        from .literals import format_exact
        def vec(v):
            ex = v.exact
            if ex is None:
                return repr(v)
            parts = ["rat:" + format_exact(c) for c in ex]
            return parts[0] if len(parts) == 1 else "(" + ",".join(parts) + ")"
        return f"killer:{vec(self.x)};{vec(self.y)};{self.ell}"

    def exact_verdict(self, e):
        ex, ey = self.x.exact, self.y.exact
        if ex is None or ey is None:
            return None
        from .rational import RationalPair, contains_integer_point
        # rational orbits are periodic: the running minimum is eventually
        # 0 (zero hit) or a positive constant
        hit = contains_integer_point(RationalPair(ex, ey))
        return EXACT_CONVERGES if hit.found else EXACT_DIVERGES


class Contract(PsiSpec):
    """``psi(u n) / u``."""

    form = "contract"

    def __init__(self, base: PsiSpec, u: int):
        self.base, self.u = base, _positive(u, "u")

    def value(self, n):
        return self.base(self.u * n) * Fraction(1, self.u)

    def literal(self):
        return f"contract:{self.u}:<{self.base.literal()}>"

    def exact_verdict(self, e):
        # for non-increasing f, sum f(u n) and sum f(n) converge together
        return self.base.exact_verdict(e)


class Dilate(PsiSpec):
    """``psi(v n)``."""

    form = "dilate"

    def __init__(self, base: PsiSpec, v: int):
        self.base, self.v = base, _positive(v, "v")

    def value(self, n):
        return self.base(self.v * n)

    def literal(self):
        return f"dilate:{self.v}:<{self.base.literal()}>"

    def exact_verdict(self, e):
        return self.base.exact_verdict(e)


class Power(PsiSpec):
    """``psi(n) ** t``."""

    form = "power"

    def __init__(self, base: PsiSpec, t):
        self.base, self.t = base, _exponent(t)

    def value(self, n):
        return self.base(n) ** self.t

    def literal(self):
        return f"powof:<{self.base.literal()}>^{self.t}"

    def exact_verdict(self, e):
        return self.base.exact_verdict(e * self.t)


def _positive(v, what) -> int:
    if int(v) != v or v < 1:
        raise DomainError(f"{what} must be a positive integer, got {v}")
    return int(v)


def _exponent(t) -> Fraction:
    t = Fraction(t)
    if t <= 0:
        raise DomainError("exponent must be positive")
    return t


# -- operations ---------------------------------------------------------------

def killer_psi(x, y, ell: int) -> Killer:
    return Killer(x, y, ell)


def discretize_reciprocal(psi: PsiSpec, prefix: int) -> ReciprocalSeq:
    """``k_n`` with ``k_n - 1 < 1/psi(n) <= k_n`` for ``n <= prefix``."""
    if prefix < 1:
        raise DomainError("prefix must be positive")
    ks = []
    for n in range(1, prefix + 1):
        v = psi(n)
        if compare(v, 0, contested=n) == 0:
            raise DomainError(f"discretization undefined at zero (psi({n}) = 0)")
        ks.append(ceil_real(v.reciprocal()))
    return ReciprocalSeq(ks)


def transform_contract(psi: PsiSpec, u: int) -> PsiSpec:
    return psi if _positive(u, "u") == 1 else psi.contract(u)


def transform_dilate(psi: PsiSpec, v: int) -> PsiSpec:
    return psi if _positive(v, "v") == 1 else psi.dilate(v)


def psi_power(psi: PsiSpec, t) -> PsiSpec:
    return psi if Fraction(t) == 1 else psi.power(t)


def membership_W(x, y, psi: PsiSpec, N: int) -> list[int]:
    """Every ``n <= N`` with ``||n x + y|| < psi(n)``, each comparison certified.

    An undecidable comparison raises :class:`PrecisionExhausted` whose
    ``contested`` is the offending ``n``.
    """
    x, y = as_vector(x), as_vector(y)
    if x.dim != y.dim:
        raise DimensionMismatch(f"x has dim {x.dim}, y has dim {y.dim}")
    out = []
    for n in range(1, N + 1):
        p = psi(n)
        if p.exact == 0:
            continue
        if compare(torus_dist(affine_orbit_point(x, y, n)), p, contested=n) < 0:
            out.append(n)
    return out


@dataclass
class DReport:
    """Partial sums of ``psi(n)**e`` along a schedule."""

    e: Fraction
    partial_sums: list
    verdict: str
    status: str
    literal: str = ""


def _partial_power_sums(psi: PsiSpec, e: Fraction, schedule) -> list:
    q = get_precision()[0]
    mids = rads = 0
    out = []
    n = 1
    for N in schedule:
        while n <= N:
            m, r = (psi(n) ** e).fixed(q)
            mids += m
            rads += r
            n += 1
        out.append((N, interval(Fraction(mids - rads, 1 << q), Fraction(mids + rads, 1 << q))))
    return out


def divergence_check_D(psi: PsiSpec, d, schedule, *, tolerance=Fraction(1, 10 ** 9),
                       ratio=Fraction(1, 2), window: int = 5) -> DReport:
    """Is ``sum_n psi(n)**d`` divergent?  Exact for symbolic forms, otherwise
    a hint from the partial sums (geometric decay below ``tolerance`` means
    converging, increments that never decay by ``ratio`` mean diverging)."""
    e = Fraction(d)
    if e <= 0:
        raise DomainError("d must be positive")
    schedule = [int(n) for n in schedule]
    if not schedule or schedule[0] < 1 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise DomainError("schedule must be an increasing list of positive integers")
    partials = _partial_power_sums(psi, e, schedule)
    exact = psi.exact_verdict(e)
    if exact is not None:
        verdict = "diverging" if exact == EXACT_DIVERGES else "converging"
        return DReport(e, partials, verdict, exact, psi.literal())
    mids = [float(v) for _, v in partials]
    incs = [b - a for a, b in zip(mids, mids[1:])]
    verdict = "inconclusive"
    if len(incs) >= window:
        tail = incs[-window:]
        if all(i < tolerance for i in tail) and all(b <= ratio * a for a, b in zip(tail, tail[1:])):
            verdict = "converging"
        elif all(i >= tolerance for i in tail) and all(b > ratio * a for a, b in zip(tail, tail[1:])):
            verdict = "diverging"
    return DReport(e, partials, verdict, HINT, psi.literal())


# -- literal grammar ------------------------------------------------------------

def _scalar(text: str) -> Real:
    from .literals import parse_fraction, parse_number
    text = text.strip()
    return parse_number(text) if ":" in text else Rat(parse_fraction(text))


def parse_psi(text: str) -> PsiSpec:
    """``pow:c,alpha``, ``const:c``, ``recip:[k1,...]``, ``table:[v1,...]``,
    ``killer:x;y;ell``, ``powof:<psi>^t`` (angle brackets optional)."""
    from .literals import parse_fraction, parse_vector, split_top
    text = text.strip()
    kind, sep, body = text.partition(":")
    if not sep:
        raise LiteralParseError(f"psi literal needs a kind prefix: {text!r}")
    try:
        if kind == "pow":
            parts = split_top(body)
            if len(parts) != 2:
                raise LiteralParseError(f"pow:c,alpha expected, got {text!r}")
            return PowerLaw(_scalar(parts[0]), parse_fraction(parts[1]))
        if kind == "const":
            return Table([_scalar(body)])
        if kind in ("recip", "table"):
            body = body.strip()
            if not (body.startswith("[") and body.endswith("]")):
                raise LiteralParseError(f"{kind} needs a bracketed list: {text!r}")
            items = split_top(body[1:-1])
            if kind == "recip":
                try:
                    return ReciprocalSeq(int(t) for t in items)
                except ValueError as exc:
                    raise LiteralParseError(f"bad integer in {text!r}") from exc
            return Table([_scalar(t) for t in items])
        if kind == "killer":
            parts = split_top(body, ";")
            if len(parts) != 3:
                raise LiteralParseError(f"killer:x;y;ell expected, got {text!r}")
            try:
                ell = int(parts[2])
            except ValueError as exc:
                raise LiteralParseError(f"bad ell in {text!r}") from exc
            return Killer(parse_vector(parts[0]), parse_vector(parts[1]), ell)
        if kind == "powof":
            base, caret, t = body.rpartition("^")
            if not caret:
                raise LiteralParseError(f"powof:<psi>^t expected, got {text!r}")
            base = base.strip()
            if base.startswith("<") and base.endswith(">"):
                base = base[1:-1]
            return psi_power(parse_psi(base), parse_fraction(t))
    except DomainError as exc:
        raise LiteralParseError(str(exc)) from exc
    raise LiteralParseError(f"unknown psi kind {kind!r}")
