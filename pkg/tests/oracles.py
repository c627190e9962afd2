"""Independent brute-force oracles: plain Fractions and mpmath, no library code."""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath


def dist1(v: Fraction) -> Fraction:
    f = v - math.floor(v)
    return min(f, 1 - f)


def sup_dist(x, y, n) -> Fraction:
    return max(dist1(n * a + b) for a, b in zip(x, y))


def brute_records(x, y, N, start=1):
    out, best = [], None
    for n in range(start, N + 1):
        d = sup_dist(x, y, n)
        if best is None or d < best:
            out.append((n, d))
            best = d
    return out


def brute_S(x, y, ell, N, e=None):
    """Exact sum for integral exponent e (defaults to the dimension)."""
    e = len(x) if e is None else e
    total, cur = Fraction(0), None
    for n in range(ell, N + 1):
        d = sup_dist(x, y, n)
        cur = d if cur is None else min(cur, d)
        total += cur ** e
    return total


def brute_S_mp(x, y, ell, N, e, weights=None, dps=50):
    """mpmath value of the sum with real exponent e; weights use the
    weighted norm ``(max ||v_i||^(1/r_i))^(1/d)``."""
    with mpmath.workdps(dps):
        d = len(x)
        total, cur = mpmath.mpf(0), None
        for n in range(ell, N + 1):
            if weights is None:
                v = mpmath.mpf(sup_dist(x, y, n).numerator) / sup_dist(x, y, n).denominator
            else:
                parts = [mpmath.mpf(dist1(n * a + b).numerator) / dist1(n * a + b).denominator
                         for a, b in zip(x, y)]
                v = max(p ** (1 / mpmath.mpf(r.numerator) * r.denominator)
                        for p, r in zip(parts, weights) if r > 0) ** (mpmath.mpf(1) / d)
            cur = v if cur is None else min(cur, v)
            total += cur ** (mpmath.mpf(e.numerator) / e.denominator)
        return total


def integer_point_brute(x, y):
    """Least n in [1, period] with n x + y integral in every coordinate."""
    period = math.lcm(*(a.denominator for a in x))
    for n in range(1, period + 1):
        if all((n * a + b).denominator == 1 for a, b in zip(x, y)):
            return n
    return None


def mp_phi(dps=60):
    with mpmath.workdps(dps):
        return (1 + mpmath.sqrt(5)) / 2


def mp_dist(v):
    return abs(v - mpmath.nint(v))


def contains(real, value, prec=200) -> bool:
    """Does the library Real enclose the mpmath/Fraction value?"""
    lo, hi = real.enclose(prec)
    if isinstance(value, Fraction):
        return lo <= value <= hi
    with mpmath.workprec(prec + 64):
        l = mpmath.mpf(lo.numerator) / lo.denominator
        h = mpmath.mpf(hi.numerator) / hi.denominator
        slack = mpmath.mpf(2) ** (-prec + 8)
        return l - slack <= value <= h + slack
