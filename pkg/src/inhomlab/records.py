"""Best inhomogeneous approximations (strict records of the orbit's running
minimum), window minima, and the homogeneous constant ``min n ||n x||^e``.

All scans run on an integer grid (:class:`~inhomlab.numeric.Snapshot`): for
exact rational inputs the grid is the common denominator and every comparison
is exact; otherwise the grid is ``2**prec`` and every coordinate carries a
radius that grows linearly in ``n``.  An undecided comparison aborts the
attempt and the scan is redone at twice the precision.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import DimensionMismatch, DomainError
from .numeric import (Rat, Real, Snapshot, TorusVector, Undecided, Weights,
                      affine_orbit_point, as_vector, get_precision, interval,
                      pow_ceil, pow_floor, refine, snapshot, torus_dist,
                      weighted_dist)


@dataclass(frozen=True)
class NormPlan:
    """How coordinate distances become one comparable integer key.

    With ``powers`` None the key is ``max_i dist_i`` over ``active``;
    otherwise it is ``max_i dist_i**k_i * scale**(top - k_i)``.  In both cases
    the norm equals ``(key / scale**top) ** norm_power``.
    """

    active: tuple
    powers: tuple | None
    top: int
    norm_power: Fraction
    weights: Weights | None = None

    @property
    def label(self) -> str:
        if self.weights is None:
            return "sup"
        return "weighted(" + ",".join(str(r) for r in self.weights.r) + ")"

    def den(self, scale: int) -> int:
        return scale ** self.top

    def norm(self, v: TorusVector) -> Real:
        return torus_dist(v) if self.weights is None else weighted_dist(v, self.weights)


def sup_plan(d: int) -> NormPlan:
    return NormPlan(tuple(range(d)), None, 1, Fraction(1))


def weighted_plan(r: Weights) -> NormPlan:
    d = r.dim
    active = tuple(i for i, ri in enumerate(r.r) if ri > 0)
    c = [1 / r.r[i] for i in active]
    if len(set(c)) == 1:
        return NormPlan(active, None, 1, c[0] / d, r)
    lcm = math.lcm(*(ci.denominator for ci in c))
    powers = tuple(int(ci * lcm) for ci in c)
    return NormPlan(active, powers, max(powers), Fraction(1, lcm * d), r)


def plan_for(d: int, weights: Weights | None) -> NormPlan:
    if weights is None:
        return sup_plan(d)
    if weights.dim != d:
        raise DimensionMismatch(f"weights have dim {weights.dim}, vectors have dim {d}")
    return weighted_plan(weights)


def orbit_keys(snap: Snapshot, plan: NormPlan, start: int, stop: int
               ) -> Iterator[tuple[int, int]]:
    """Yield ``(key_lo, key_hi)`` for ``n = start .. stop`` (inclusive)."""
    D = snap.scale
    half = D // 2
    X, Y = snap.mids
    RX, RY = snap.rads
    idx = plan.active
    xs = [X[i] for i in idx]
    vs = [(start * X[i] + Y[i]) % D for i in idx]
    rx = [RX[i] for i in idx]
    ry = [RY[i] for i in idx]
    count = stop - start + 1
    if count <= 0:
        return
    if len(idx) == 1 and plan.powers is None:
        x0, v = xs[0], vs[0]
        if snap.exact:
            for _ in range(count):
                k = v if v <= half else D - v
                yield k, k
                v += x0
                if v >= D:
                    v -= D
            return
        rx0, ry0 = rx[0], ry[0]
        n = start
        for _ in range(count):
            k = v if v <= half else D - v
            r = n * rx0 + ry0
            yield (k - r if k > r else 0), (k + r if k + r < half else half)
            v += x0
            if v >= D:
                v -= D
            n += 1
        return
    m = len(idx)
    powers = plan.powers
    top = plan.top
    scale_pows = None if powers is None else [D ** (top - k) for k in powers]
    n = start
    for _ in range(count):
        los, his = [], []
        for j in range(m):
            v = vs[j]
            k = v if v <= half else D - v
            if snap.exact:
                los.append(k)
            else:
                r = n * rx[j] + ry[j]
                los.append(k - r if k > r else 0)
                his.append(k + r if k + r < half else half)
            v += xs[j]
            vs[j] = v - D if v >= D else v
        if snap.exact:
            his = los
        if powers is None:
            yield max(los), max(his)
        else:
            yield (max(l ** p * s for l, p, s in zip(los, powers, scale_pows)),
                   max(h ** p * s for h, p, s in zip(his, powers, scale_pows)))
        n += 1


@dataclass(frozen=True)
class Record:
    t: int
    key_lo: int
    key_hi: int


@dataclass(frozen=True)
class RecordSequence:
    """Strict records ``t_1 < t_2 < ...`` of ``||t x + y||`` over ``start <= t <= scan_bound``."""

    x: TorusVector
    y: TorusVector
    records: tuple
    scan_bound: int
    start: int
    zero_hit: bool
    exact: bool
    scale: int
    plan: NormPlan

    @property
    def den(self) -> int:
        return self.plan.den(self.scale)

    @property
    def times(self) -> list[int]:
        return [r.t for r in self.records]

    def delta(self, k: int) -> Real:
        """The norm ``||t_k x + y||`` of the k-th record (0-based), refinable."""
        rec = self.records[k]
        if self.exact:
            v = _exact_power(rec.key_lo, self.den, self.plan.norm_power)
            if v is not None:
                return Rat(v)
        return self.plan.norm(affine_orbit_point(self.x, self.y, rec.t))

    @property
    def entries(self) -> list[tuple[int, Real]]:
        return [(r.t, self.delta(k)) for k, r in enumerate(self.records)]

    def power_bounds(self, k: int, e: Fraction, q: int) -> tuple[int, int]:
        """Integers ``lo <= delta_k**e * 2**q <= hi``."""
        rec, t = self.records[k], self.plan.norm_power * e
        return pow_floor(rec.key_lo, self.den, t, q), pow_ceil(rec.key_hi, self.den, t, q)

    def exact_power(self, k: int, e: Fraction) -> Fraction | None:
        if not self.exact:
            return None
        return _exact_power(self.records[k].key_lo, self.den, self.plan.norm_power * e)


def _exact_power(key: int, den: int, t: Fraction) -> Fraction | None:
    if t.denominator != 1:
        from .numeric import exact_root
        return exact_root(Fraction(key, den), t)
    return Fraction(key, den) ** t.numerator


def scan_precision(stop: int) -> int:
    start, _ = get_precision()
    return max(start, 2 * stop.bit_length() + 64)


def _scan_block(snap: Snapshot, plan: NormPlan, start: int, stop: int):
    recs = []
    cur_lo = cur_hi = None
    zero = False
    for n, (lo, hi) in zip(itertools.count(start), orbit_keys(snap, plan, start, stop)):
        if cur_lo is not None:
            if lo >= cur_hi:
                continue
            if hi >= cur_lo:
                raise Undecided((n, recs[-1].t))
        recs.append(Record(n, lo, hi))
        cur_lo, cur_hi = lo, hi
        if snap.exact and hi == 0:
            zero = True
            break
    return recs, zero


def _merge_blocks(parts):
    out = []
    for recs, zero in parts:
        for rec in recs:
            if out:
                if rec.key_lo >= out[-1].key_hi:
                    continue
                if rec.key_hi >= out[-1].key_lo:
                    raise Undecided((rec.t, out[-1].t))
            out.append(rec)
            if zero and rec is recs[-1]:
                return out, True
    return out, False


def scan_records(x, y, N: int, *, start: int = 1, weights: Weights | None = None,
                 jobs: int = 1, block: int | None = None) -> RecordSequence:
    """Enumerate the strict records of ``t -> ||t x + y||`` for
    ``start <= t <= N``.

    A record beats every earlier time strictly; ties do not create records.
    The scan stops early at an exact zero.  With ``jobs > 1`` (or an explicit
    ``block``) the range is split into blocks whose local records are merged
    in order; the result is identical to the sequential scan.
    """
    x, y = as_vector(x), as_vector(y)
    if x.dim != y.dim:
        raise DimensionMismatch(f"x has dim {x.dim}, y has dim {y.dim}")
    if N < start or start < 1:
        raise DomainError(f"need 1 <= start <= N, got start={start}, N={N}")
    plan = plan_for(x.dim, weights)

    def attempt(p):
        snap = snapshot([x, y], p)
        if jobs <= 1 and block is None:
            recs, zero = _scan_block(snap, plan, start, N)
        else:
            size = block or max(1, (N - start + 1 + jobs - 1) // jobs)
            bounds = [(a, min(a + size - 1, N)) for a in range(start, N + 1, size)]
            if jobs > 1:
                with ProcessPoolExecutor(max_workers=jobs) as pool:
                    parts = list(pool.map(_scan_block, *zip(*[(snap, plan, a, b) for a, b in bounds])))
            else:
                parts = [_scan_block(snap, plan, a, b) for a, b in bounds]
            recs, zero = _merge_blocks(parts)
        return RecordSequence(x, y, tuple(recs), N, start, zero, snap.exact, snap.scale, plan)

    return refine(attempt, start=scan_precision(N), what="record comparison")


def window_min(x, y, ell: int, n: int, *, weights: Weights | None = None) -> Real:
    """``min_{ell <= m <= n} ||m x + y||`` as an exact or refinable Real."""
    rs = scan_records(x, y, n, start=ell, weights=weights)
    return rs.delta(len(rs.records) - 1)


def best_constant(x, N: int, *, exponent=None, weights: Weights | None = None
                  ) -> tuple[int, Real]:
    """``(n*, c)`` with ``c = n* ||n* x||^e = min_{1 <= n <= N} n ||n x||^e``.

    ``e`` defaults to the dimension.  The minimiser is certified; ties keep
    the smallest ``n``.
    """
    x = as_vector(x)
    d = x.dim
    e = Fraction(d) if exponent is None else Fraction(exponent)
    plan = plan_for(d, weights)
    t = plan.norm_power * e
    u, v = t.numerator, t.denominator
    zero = TorusVector((Rat(0),) * d)

    def attempt(p):
        snap = snapshot([x, zero], p)
        best_n, best_lo, best_hi = None, None, None
        for n, (lo, hi) in zip(itertools.count(1), orbit_keys(snap, plan, 1, N)):
            nv = n ** v
            vlo = nv * lo ** u
            if best_n is not None and vlo >= best_hi:
                continue
            vhi = nv * hi ** u
            if best_n is not None and vhi >= best_lo:
                raise Undecided((n, best_n))
            best_n, best_lo, best_hi = n, vlo, vhi
            if snap.exact and vhi == 0:
                break
        return best_n

    n_star = refine(attempt, start=scan_precision(N), what="homogeneous constant")
    c = Rat(n_star) * plan.norm(affine_orbit_point(x, zero, n_star)) ** e
    return n_star, c
