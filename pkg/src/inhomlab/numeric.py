"""Exact and interval-refinable reals, torus vectors and torus norms.

Every scalar is a :class:`Real`.  Exact rationals are :class:`Rat`; anything
else only promises an *enclosure* ``lo <= x <= hi`` (a pair of Fractions) at a
requested bit precision.  Comparisons are three-valued at a fixed precision
(:func:`try_compare`) and refined by doubling up to a ceiling
(:func:`compare`), after which :class:`PrecisionExhausted` is raised.

Reals are immutable.  Each carries a structural ``ident`` so that a value is
recognised as equal to itself even when its enclosures never collapse.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import gmpy2

from .errors import DimensionMismatch, DomainError, PrecisionExhausted

DEFAULT_PRECISION = 128
DEFAULT_CEILING = 1 << 15

_precision = contextvars.ContextVar(
    "inhomlab_precision", default=(DEFAULT_PRECISION, DEFAULT_CEILING)
)


def get_precision() -> tuple[int, int]:
    """Return the ``(start, ceiling)`` bit precisions of the current context."""
    return _precision.get()


@contextlib.contextmanager
def working_precision(start: int | None = None, ceiling: int | None = None):
    """Temporarily change the starting precision and/or the ceiling."""
    cur_start, cur_ceiling = _precision.get()
    start = cur_start if start is None else int(start)
    ceiling = cur_ceiling if ceiling is None else int(ceiling)
    if start < 8 or ceiling < start:
        raise DomainError(f"bad precision context start={start} ceiling={ceiling}")
    token = _precision.set((start, ceiling))
    try:
        yield
    finally:
        _precision.reset(token)


class Undecided(Exception):
    """Raised inside a precision attempt; callers refine and retry."""

    def __init__(self, contested=None):
        super().__init__(contested)
        self.contested = contested


def refine(attempt: Callable[[int], object], start: int | None = None,
           ceiling: int | None = None, what: str = "comparison"):
    """Run ``attempt(prec)`` with doubling precision until it stops raising
    :class:`Undecided`."""
    ctx_start, ctx_ceiling = get_precision()
    prec = ctx_start if start is None else start
    ceiling = ctx_ceiling if ceiling is None else ceiling
    while True:
        try:
            return attempt(prec)
        except Undecided as exc:
            if prec >= ceiling:
                raise PrecisionExhausted(
                    f"{what} undecided at precision ceiling {ceiling} bits"
                    + (f" (contested: {exc.contested})" if exc.contested is not None else ""),
                    contested=exc.contested, precision=prec) from None
            prec = min(2 * prec, ceiling)


# -- integer helpers -------------------------------------------------------

def floor_scaled(v: Fraction, q: int) -> int:
    """floor(v * 2**q)."""
    return (v.numerator << q) // v.denominator


def ceil_scaled(v: Fraction, q: int) -> int:
    return -((-v.numerator << q) // v.denominator)


def round_out(lo: Fraction, hi: Fraction, q: int) -> tuple[Fraction, Fraction]:
    """Widen ``[lo, hi]`` to dyadic endpoints with denominator ``2**q``."""
    den = 1 << q
    if lo.denominator > den:
        lo = Fraction(floor_scaled(lo, q), den)
    if hi.denominator > den:
        hi = Fraction(ceil_scaled(hi, q), den)
    return lo, hi


def pow_floor(num: int, den: int, t: Fraction, q: int) -> int:
    """floor((num/den)**t * 2**q) for num >= 0, den > 0 and rational t."""
    if num == 0:
        if t <= 0:
            raise DomainError("0 raised to a non-positive power")
        return 0
    u, v = t.numerator, t.denominator
    if u < 0:
        num, den, u = den, num, -u
    a, b = num ** u, den ** u
    if v == 1:
        return (a << q) // b
    root, _ = gmpy2.iroot(gmpy2.mpz((a << (q * v)) // b), v)
    return int(root)


def pow_ceil(num: int, den: int, t: Fraction, q: int) -> int:
    if num == 0:
        return pow_floor(num, den, t, q)
    u, v = t.numerator, t.denominator
    if u < 0:
        num, den, u = den, num, -u
    a, b = num ** u, den ** u
    if v == 1:
        return -((-a << q) // b)
    r = pow_floor(num, den, Fraction(u, v), q)
    return r if r ** v * b == a << (q * v) else r + 1


def exact_root(value: Fraction, t: Fraction) -> Fraction | None:
    """Return value**t when it is rational, else None (value >= 0)."""
    u, v = t.numerator, t.denominator
    if value == 0:
        return Fraction(0) if u > 0 else None
    base = value ** u
    if v == 1:
        return base
    n, exact_n = gmpy2.iroot(gmpy2.mpz(base.numerator), v)
    d, exact_d = gmpy2.iroot(gmpy2.mpz(base.denominator), v)
    if exact_n and exact_d:
        return Fraction(int(n), int(d))
    return None


# -- Real ------------------------------------------------------------------

class Real:
    """A real number known through exact value or refinable enclosures."""

    __slots__ = ()

    @property
    def exact(self) -> Fraction | None:
        return None

    @property
    def ident(self) -> tuple:
        raise NotImplementedError

    def enclose(self, prec: int) -> tuple[Fraction, Fraction]:
        raise NotImplementedError

    def fixed(self, prec: int) -> tuple[int, int]:
        """Return ``(M, R)`` with ``|x - M/2**prec| <= R/2**prec``."""
        e = self.exact
        if e is not None:
            scaled = e * (1 << prec)
            m = round(scaled)
            return m, (0 if m == scaled else 1)
        lo, hi = self.enclose(prec + 2)
        mid = (lo + hi) / 2
        return round(mid * (1 << prec)), ceil_scaled((hi - lo) / 2, prec) + 1

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = as_real(other)
        if self.exact is not None and other.exact is not None:
            return Rat(self.exact + other.exact)

        def fn(p, a=self, b=other):
            alo, ahi = a.enclose(p + 4)
            blo, bhi = b.enclose(p + 4)
            return round_out(alo + blo, ahi + bhi, p + 4)
        return Computed(("add", self.ident, other.ident), fn)

    __radd__ = __add__

    def __neg__(self):
        if self.exact is not None:
            return Rat(-self.exact)

        def fn(p, a=self):
            lo, hi = a.enclose(p)
            return -hi, -lo
        return Computed(("neg", self.ident), fn)

    def __sub__(self, other):
        return self + (-as_real(other))

    def __rsub__(self, other):
        return as_real(other) + (-self)

    def __mul__(self, other):
        other = as_real(other)
        if self.exact is not None and other.exact is not None:
            return Rat(self.exact * other.exact)
        if other.exact == 1:
            return self
        if self.exact == 1:
            return other

        def fn(p, a=self, b=other):
            ea, eb = a.exact, b.exact
            # extra bits cover the magnitude of the other factor
            ga = 8 + _magnitude_bits(b, p)
            gb = 8 + _magnitude_bits(a, p)
            alo, ahi = (ea, ea) if ea is not None else a.enclose(p + ga)
            blo, bhi = (eb, eb) if eb is not None else b.enclose(p + gb)
            prods = (alo * blo, alo * bhi, ahi * blo, ahi * bhi)
            return round_out(min(prods), max(prods), p + 4)
        return Computed(("mul", self.ident, other.ident), fn)

    __rmul__ = __mul__

    def reciprocal(self):
        if self.exact is not None:
            if self.exact == 0:
                raise DomainError("division by exact zero")
            return Rat(1 / self.exact)

        def fn(p, a=self):
            q = p
            for _ in range(4):
                lo, hi = a.enclose(q)
                if lo > 0 or hi < 0:
                    mag = min(abs(lo), abs(hi))
                    # |1/x| error scales with 1/mag**2; make sure we asked for enough
                    need = p + 2 * max(0, -_floor_log2(mag)) + 4
                    if need > q:
                        q = need
                        continue
                    return round_out(1 / hi, 1 / lo, p + 4)
                q *= 2
            raise Undecided(("reciprocal", a.ident))
        return Computed(("inv", self.ident), fn)

    def __truediv__(self, other):
        return self * as_real(other).reciprocal()

    def __rtruediv__(self, other):
        return as_real(other) * self.reciprocal()

    def __pow__(self, t):
        """Rational power of a non-negative real (t > 0), or any integer power."""
        t = Fraction(t)
        e = self.exact
        if e is not None:
            if t.denominator == 1:
                if e == 0 and t <= 0:
                    raise DomainError("0 raised to a non-positive power")
                return Rat(e ** t.numerator)
            if e < 0:
                raise DomainError("fractional power of a negative number")
            r = exact_root(e, t)
            if r is not None:
                return Rat(r)
        if t <= 0:
            return (self ** (-t)).reciprocal() if t < 0 else Rat(1)
        if t == 1:
            return self

        def fn(p, a=self, t=t):
            q = p + 8 + 4 * math.ceil(t)
            lo, hi = (e, e) if e is not None else a.enclose(q)
            if t.denominator == 1:
                vals = [lo ** t.numerator, hi ** t.numerator]
                if lo < 0 < hi:
                    vals.append(Fraction(0))
                return round_out(min(vals), max(vals), p + 4)
            if hi < 0:
                raise DomainError("fractional power of a negative number")
            lo = max(lo, Fraction(0))
            return (Fraction(pow_floor(lo.numerator, lo.denominator, t, p + 4), 1 << (p + 4)),
                    Fraction(pow_ceil(hi.numerator, hi.denominator, t, p + 4), 1 << (p + 4)))
        return Computed(("pow", self.ident, t), fn)

    # comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.exact is not None and self.exact == other
        if isinstance(other, Real):
            if self.exact is not None and other.exact is not None:
                return self.exact == other.exact
            return self.ident == other.ident
        return NotImplemented

    def __hash__(self):
        e = self.exact
        return hash(e) if e is not None else hash(self.ident)

    def __float__(self):
        e = self.exact
        if e is not None:
            return float(e)
        lo, hi = self.enclose(64)
        return float((lo + hi) / 2)

    def __repr__(self):
        return f"{type(self).__name__}({format_real(self, 20)})"


def _floor_log2(v: Fraction) -> int:
    v = abs(v)
    if v == 0:
        return -(1 << 20)
    return v.numerator.bit_length() - v.denominator.bit_length()


def _magnitude_bits(x: Real, p: int) -> int:
    e = x.exact
    if e is not None:
        return max(0, _floor_log2(e) + 1)
    lo, hi = x.enclose(min(p, 64))
    return max(0, _floor_log2(max(abs(lo), abs(hi))) + 2)


class Rat(Real):
    """Exact rational."""

    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", Fraction(value))

    def __setattr__(self, *_):
        raise AttributeError("Rat is immutable")

    @property
    def exact(self):
        return self.value

    @property
    def ident(self):
        return ("rat", self.value)

    def enclose(self, prec):
        return self.value, self.value

    def __repr__(self):
        return f"Rat({self.value})"


class Ball(Real):
    """Midpoint with radius.  Not refinable beyond its radius."""

    __slots__ = ("mid", "radius")

    def __init__(self, mid, radius):
        radius = Fraction(radius)
        if radius < 0:
            raise DomainError("negative radius")
        object.__setattr__(self, "mid", Fraction(mid))
        object.__setattr__(self, "radius", radius)

    def __setattr__(self, *_):
        raise AttributeError("Ball is immutable")

    @property
    def ident(self):
        return ("ball", self.mid, self.radius)

    def enclose(self, prec):
        return self.mid - self.radius, self.mid + self.radius


class Computed(Real):
    """A real defined by an enclosure function ``prec -> (lo, hi)``."""

    __slots__ = ("_ident", "_fn", "_cache")

    def __init__(self, ident: tuple, fn: Callable[[int], tuple[Fraction, Fraction]]):
        object.__setattr__(self, "_ident", ident)
        object.__setattr__(self, "_fn", fn)
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, *_):
        raise AttributeError("Computed is immutable")

    @property
    def ident(self):
        return self._ident

    def enclose(self, prec):
        hit = self._cache.get(prec)
        if hit is None:
            hit = self._fn(prec)
            if len(self._cache) > 16:
                self._cache.clear()
            self._cache[prec] = hit
        return hit


def interval(lo: Fraction, hi: Fraction) -> Real:
    """A fixed enclosure as a Real (exact when ``lo == hi``)."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo == hi:
        return Rat(lo)
    if lo > hi:
        raise DomainError("empty interval")
    return Ball((lo + hi) / 2, (hi - lo) / 2)


def as_real(v) -> Real:
    if isinstance(v, Real):
        return v
    if isinstance(v, bool):
        raise DomainError("booleans are not numbers")
    if isinstance(v, (int, Fraction)):
        return Rat(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise DomainError("non-finite float")
        return Rat(Fraction(v))
    if isinstance(v, str):
        from .literals import parse_number
        return parse_number(v)
    raise DomainError(f"cannot interpret {v!r} as a real number")


def try_compare(a, b, prec: int) -> int | None:
    """-1, 0 or 1 when decided at ``prec`` bits, else None."""
    a, b = as_real(a), as_real(b)
    ea, eb = a.exact, b.exact
    if ea is not None and eb is not None:
        return (ea > eb) - (ea < eb)
    if a.ident == b.ident:
        return 0
    alo, ahi = (ea, ea) if ea is not None else a.enclose(prec)
    blo, bhi = (eb, eb) if eb is not None else b.enclose(prec)
    if ahi < blo:
        return -1
    if alo > bhi:
        return 1
    return None


def compare(a, b, start: int | None = None, ceiling: int | None = None,
            contested=None) -> int:
    """Certified comparison with precision doubling; raises
    :class:`PrecisionExhausted` past the ceiling."""
    a, b = as_real(a), as_real(b)

    def attempt(p):
        r = try_compare(a, b, p)
        if r is None:
            raise Undecided(contested)
        return r
    return refine(attempt, start, ceiling)


def less(a, b, **kw) -> bool:
    return compare(a, b, **kw) < 0


def floor_real(x, start: int | None = None, ceiling: int | None = None) -> int:
    x = as_real(x)
    e = x.exact
    if e is not None:
        return math.floor(e)

    def attempt(p):
        lo, hi = x.enclose(p)
        if math.floor(lo) == math.floor(hi):
            return math.floor(lo)
        raise Undecided(("floor", x.ident))
    return refine(attempt, start, ceiling, what="floor")


def ceil_real(x, **kw) -> int:
    return -floor_real(-as_real(x), **kw)


def nearest_int(x, **kw) -> int:
    """Nearest integer, ties to even.  Ties are only decidable for exact x."""
    x = as_real(x)
    e = x.exact
    if e is not None:
        return round(e)  # Fraction rounds half to even
    return floor_real(x + Fraction(1, 2), **kw)


def format_real(x, digits: int = 30) -> str:
    """Decimal rendering of the enclosure midpoint with ``digits`` places."""
    x = as_real(x)
    e = x.exact
    if e is None:
        lo, hi = x.enclose(math.ceil(digits * 3.33) + 16)
        e = (lo + hi) / 2
    scaled = round(e * 10 ** digits)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, frac = divmod(scaled, 10 ** digits)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"


def radius_of(x, prec: int = 256) -> Fraction:
    x = as_real(x)
    if x.exact is not None:
        return Fraction(0)
    lo, hi = x.enclose(prec)
    return (hi - lo) / 2


def reduce_mod1(x) -> Real:
    """Reduce into [0, 1).  Exact values reduce exactly; otherwise the floor
    is certified when it can be, and taken from the midpoint when the value
    sits on an integer within its own radius."""
    x = as_real(x)
    e = x.exact
    if e is not None:
        return Rat(e - math.floor(e))
    start, _ = get_precision()
    for p in (start, 4 * start):
        lo, hi = x.enclose(p)
        if math.floor(lo) == math.floor(hi):
            k = math.floor(lo)
            return x if k == 0 else x - k

    def fn(p, x=x):
        lo, hi = x.enclose(p)
        k = math.floor((lo + hi) / 2)
        return lo - k, hi - k
    return Computed(("frac", x.ident), fn)


# -- torus vectors, weights, exponents ---------------------------------------

@dataclass(frozen=True, eq=True)
class TorusVector:
    """A point of R^d / Z^d."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(reduce_mod1(c) for c in self.coords)
        if not coords:
            raise DomainError("a torus vector needs at least one coordinate")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *values) -> "TorusVector":
        if len(values) == 1 and isinstance(values[0], (list, tuple)):
            values = tuple(values[0])
        return cls(tuple(values))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    @property
    def exact(self) -> tuple[Fraction, ...] | None:
        vals = tuple(c.exact for c in self.coords)
        return None if any(v is None for v in vals) else vals

    def __neg__(self):
        return TorusVector(tuple(-c for c in self.coords))

    def __add__(self, other):
        other = as_vector(other)
        _check_dims(self, other)
        return TorusVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def scale(self, k) -> "TorusVector":
        return TorusVector(tuple(c * k for c in self.coords))

    def __repr__(self):
        return "TorusVector(" + ", ".join(
            str(c.exact) if c.exact is not None else format_real(c, 12) + "..."
            for c in self.coords) + ")"


def as_vector(v) -> TorusVector:
    if isinstance(v, TorusVector):
        return v
    if isinstance(v, str):
        from .literals import parse_vector
        return parse_vector(v)
    if isinstance(v, (list, tuple)):
        return TorusVector(tuple(as_real(c) for c in v))
    return TorusVector((as_real(v),))


def _check_dims(*vectors):
    dims = {v.dim for v in vectors}
    if len(dims) != 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")


@dataclass(frozen=True)
class Weights:
    """A point of the standard simplex, restricted to exact rationals."""

    r: tuple

    def __post_init__(self):
        r = tuple(Fraction(v) for v in self.r)
        if not r:
            raise DomainError("empty weight vector")
        if any(v < 0 for v in r):
            raise DomainError("weights must be non-negative")
        if sum(r) != 1:
            raise DomainError(f"weights must sum to 1, got {sum(r)}")
        object.__setattr__(self, "r", r)

    @classmethod
    def uniform(cls, d: int) -> "Weights":
        return cls((Fraction(1, d),) * d)

    @property
    def dim(self) -> int:
        return len(self.r)

    @property
    def is_uniform(self) -> bool:
        return all(v == Fraction(1, self.dim) for v in self.r)


@dataclass(frozen=True)
class Exponent:
    """An irrationality exponent sigma (>= 1/d, checked against d on use)."""

    sigma: Fraction

    def __post_init__(self):
        s = Fraction(self.sigma)
        if s <= 0:
            raise DomainError("sigma must be positive")
        object.__setattr__(self, "sigma", s)

    def check(self, d: int):
        if self.sigma < Fraction(1, d):
            raise DomainError(f"sigma={self.sigma} below 1/d={Fraction(1, d)}")


# -- distances ----------------------------------------------------------------

def _dist1(x: Real) -> Real:
    """Distance of a single coordinate to the nearest integer."""
    e = x.exact
    if e is not None:
        f = e - math.floor(e)
        return Rat(min(f, 1 - f))

    def fn(p, x=x):
        lo, hi = x.enclose(p)
        if hi - lo >= 1:
            return Fraction(0), Fraction(1, 2)
        mid = (lo + hi) / 2
        f = mid - math.floor(mid)
        d = min(f, 1 - f)
        h = (hi - lo) / 2
        return max(Fraction(0), d - h), min(Fraction(1, 2), d + h)
    return Computed(("dist1", x.ident), fn)


def _max_real(vals: Sequence[Real]) -> Real:
    if len(vals) == 1:
        return vals[0]
    if all(v.exact is not None for v in vals):
        return Rat(max(v.exact for v in vals))

    def fn(p, vals=vals):
        encs = [v.enclose(p) for v in vals]
        return max(lo for lo, _ in encs), max(hi for _, hi in encs)
    return Computed(("max",) + tuple(v.ident for v in vals), fn)


def torus_dist(v) -> Real:
    """Sup-norm distance to Z^d, a value in [0, 1/2]."""
    v = as_vector(v)
    return _max_real([_dist1(c) for c in v.coords])


def weighted_dist(v, r: Weights) -> Real:
    """``(max_i ||v_i||**(1/r_i))**(1/d)``; coordinates with ``r_i = 0``
    contribute 0 since ``||v_i|| <= 1/2 < 1``."""
    v = as_vector(v)
    if not isinstance(r, Weights):
        r = Weights(tuple(r))
    if r.dim != v.dim:
        raise DimensionMismatch(f"weights have dim {r.dim}, vector has dim {v.dim}")
    parts = [_dist1(c) ** (1 / ri) for c, ri in zip(v.coords, r.r) if ri > 0]
    return _max_real(parts) ** Fraction(1, v.dim)


def affine_orbit_point(x, y, n: int) -> TorusVector:
    """``n x + y`` reduced mod 1, for a positive integer ``n``."""
    x, y = as_vector(x), as_vector(y)
    _check_dims(x, y)
    if int(n) != n or n < 1:
        raise DomainError(f"orbit index must be a positive integer, got {n}")
    n = int(n)
    return TorusVector(tuple(a * n + b for a, b in zip(x.coords, y.coords)))


# -- common-scale integer snapshots for the orbit kernels ---------------------

@dataclass(frozen=True)
class Snapshot:
    """Vectors on a common integer grid: coordinate ``i`` of vector ``j`` lies
    within ``rads[j][i]/scale`` of ``mids[j][i]/scale`` (mod 1)."""

    scale: int
    exact: bool
    mids: tuple
    rads: tuple


def snapshot(vectors: Iterable[TorusVector], prec: int) -> Snapshot:
    vectors = list(vectors)
    exact = all(v.exact is not None for v in vectors)
    if exact:
        scale = 1
        for v in vectors:
            for c in v.exact:
                scale = math.lcm(scale, c.denominator)
        mids = tuple(tuple((c.numerator * (scale // c.denominator)) % scale
                           for c in v.exact) for v in vectors)
        rads = tuple((0,) * v.dim for v in vectors)
        return Snapshot(scale, True, mids, rads)
    # rational coordinates stay exact on the grid so ties among them decide
    L = 1
    for v in vectors:
        for c in v.coords:
            if c.exact is not None:
                L = math.lcm(L, c.exact.denominator)
    scale = L << prec
    mids, rads = [], []
    for v in vectors:
        fx = [((c.exact.numerator * (L // c.exact.denominator)) << prec, 0)
              if c.exact is not None else (c * L).fixed(prec) for c in v.coords]
        mids.append(tuple(m % scale for m, _ in fx))
        rads.append(tuple(r for _, r in fx))
    return Snapshot(scale, False, tuple(mids), tuple(rads))
