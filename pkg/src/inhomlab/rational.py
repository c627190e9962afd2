"""Exact decisions for rational ``x, y``: does ``Z x + y`` meet ``Z^d``, what
does the (periodic) orbit look like, and is ``S_ell(x, y)`` finite."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch, DomainError
from .numeric import TorusVector


@dataclass(frozen=True)
class RationalPair:
    x: tuple
    y: tuple

    def __post_init__(self):
        x = tuple(Fraction(v) for v in self.x)
        y = tuple(Fraction(v) for v in self.y)
        if len(x) != len(y) or not x:
            raise DimensionMismatch(f"x has dim {len(x)}, y has dim {len(y)}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def of(cls, x, y) -> "RationalPair":
        return cls(_as_fractions(x), _as_fractions(y))

    @property
    def dim(self) -> int:
        return len(self.x)


def _as_fractions(v) -> tuple:
    if isinstance(v, TorusVector):
        e = v.exact
        if e is None:
            raise DomainError("exact-rational operations need rational coordinates")
        return e
    if isinstance(v, (list, tuple)):
        return tuple(Fraction(c) for c in v)
    return (Fraction(v),)


def solve_linear_congruence(a: int, b: int, m: int) -> tuple[int, int] | None:
    """Solutions of ``a n = b (mod m)`` as ``(r, m')`` meaning ``n = r (mod m')``."""
    g = math.gcd(a, m)
    if b % g:
        return None
    m2 = m // g
    if m2 == 1:
        return 0, 1
    return (b // g) * pow(a // g, -1, m2) % m2, m2


def combine_congruences(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int] | None:
    """Merge ``n = r1 (mod m1)`` and ``n = r2 (mod m2)``; moduli need not be coprime."""
    g = math.gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    lcm = m1 // g * m2
    mod = m2 // g
    k = (r2 - r1) // g * pow(m1 // g, -1, mod) % mod if mod > 1 else 0
    return (r1 + m1 * k) % lcm, lcm


@dataclass(frozen=True)
class IntegerPoint:
    """Answer to "does ``n x + y`` land on ``Z^d`` for some integer n".

    When it does, the solutions are ``n = residue (mod modulus)`` and
    ``least_n`` is the least positive one.  When it does not,
    ``obstruction`` is the index of the first coordinate (or the first
    coordinate whose congruence is incompatible with the earlier ones).
    """

    found: bool
    least_n: int | None = None
    residue: int | None = None
    modulus: int | None = None
    obstruction: int | None = None

    def __bool__(self):
        return self.found


def contains_integer_point(pair: RationalPair) -> IntegerPoint:
    r, m = 0, 1
    for i, (xi, yi) in enumerate(zip(pair.x, pair.y)):
        p, q = xi.numerator, xi.denominator
        a, b = yi.numerator, yi.denominator
        # n p/q + a/b in Z  <=>  n p b = -a q (mod q b)
        sol = solve_linear_congruence(p * b, -a * q, q * b)
        if sol is None:
            return IntegerPoint(False, obstruction=i)
        merged = combine_congruences(r, m, *sol)
        if merged is None:
            return IntegerPoint(False, obstruction=i)
        r, m = merged
    return IntegerPoint(True, least_n=r if r > 0 else m, residue=r, modulus=m)


def _dist(v: Fraction) -> Fraction:
    f = v - math.floor(v)
    return min(f, 1 - f)


@dataclass(frozen=True)
class OrbitSummary:
    """The orbit ``n -> n x + y (mod 1)``, ``n >= 1``, over one period."""

    period: int
    hit_zero: bool
    first_zero_n: int | None
    min_dist: Fraction
    argmin: int
    distances: tuple

    def min_dist_from(self, ell: int) -> Fraction:
        # every residue class mod the period recurs after ell
        return self.min_dist

    def first_min_from(self, ell: int) -> int:
        """Least ``n >= ell`` with ``||n x + y|| = min_dist``."""
        for n in range(ell, ell + self.period):
            if self.distances[(n - 1) % self.period] == self.min_dist:
                return n
        raise AssertionError("minimum missing from a full period")


def orbit_summary(pair: RationalPair) -> OrbitSummary:
    period = math.lcm(*(xi.denominator for xi in pair.x))
    dists = tuple(max(_dist(n * xi + yi) for xi, yi in zip(pair.x, pair.y))
                  for n in range(1, period + 1))
    m = min(dists)
    argmin = dists.index(m) + 1
    return OrbitSummary(period, m == 0, argmin if m == 0 else None, m, argmin, dists)


def s_finite(pair: RationalPair, ell: int = 1) -> bool:
    """``S_ell(x, y) < oo``; for rationals this is independent of ``ell``."""
    if ell < 1:
        raise DomainError("ell must be a positive integer")
    return contains_integer_point(pair).found


class Membership(str, enum.Enum):
    MEMBER = "member"
    NON_MEMBER = "non-member"
    UNRESOLVED = "condition-fails: membership unresolved"


def phi_membership_rational(pair: RationalPair) -> Membership:
    """Is ``y`` in the fibre over rational ``x``?  Exact for d = 1; for d > 1 a
    failing integer-point condition is reported as unresolved."""
    if contains_integer_point(pair).found:
        return Membership.MEMBER
    return Membership.NON_MEMBER if pair.dim == 1 else Membership.UNRESOLVED
