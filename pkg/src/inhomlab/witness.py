"""Witnesses ``y`` for well approximable ``x``: pick ``n_0 < n_1 < ...`` with
summable ``n_k ||n_k x||^d`` and geometrically shrinking ``||n_k x||``, set
``y = -sum_k (n_k x - a_k)`` and certify the truncated sum.

Writing ``eps_k = n_k x - a_k`` and ``N_K = n_0 + ... + n_{K-1}``, the point
``N_K x + y`` equals ``-sum_{k>=K} eps_k`` mod 1, so the orbit of ``x`` from
``y`` returns within ``sum_{k>=K} ||n_k x||`` at every time ``N_K``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .contfrac import LiouvilleReal
from .errors import CertificateRefuted, DomainError
from .numeric import (Rat, Real, TorusVector, Undecided, as_vector, compare,
                      format_real, get_precision, nearest_int, refine,
                      snapshot, torus_dist, try_compare, working_precision)
from .records import orbit_keys, scan_precision, sup_plan
from .sums import SumReport, SumSpec, partial_S

from .schemas import SCHEMA_VERSION


@dataclass(frozen=True)
class Scan:
    """Brute-force source: every ``n <= bound``."""

    bound: int


@dataclass(frozen=True)
class ApproxSequence:
    x: TorusVector
    n: tuple
    dist: tuple
    rho: Fraction
    C: Fraction

    @property
    def depth(self) -> int:
        return len(self.n) - 1

    @property
    def term_bounds(self) -> list[Real]:
        d = self.x.dim
        return [Rat(n) * v ** d for n, v in zip(self.n, self.dist)]


def _zero(d):
    return TorusVector((Rat(0),) * d)


def _designated(x: TorusVector) -> Iterator[int]:
    first = x.coords[0]
    if not isinstance(first, LiouvilleReal) or any(c.ident != first.ident for c in x.coords):
        raise DomainError("designated denominators need x built from one Liouville number")
    for j in itertools.count(1):
        yield 1 << first.g(j)


def _admissible(n: int, dist: Real, k: int, prev: Real | None, d: int,
                rho: Fraction, C: Fraction) -> bool:
    if compare(Rat(n) * dist ** d, C / (1 << k), contested=n) > 0:
        return False
    return prev is None or compare(dist, prev * rho, contested=n) <= 0


def _from_candidates(x, cands: Iterable[int], K, rho, C, limit=None):
    d = x.dim
    zero = _zero(d)
    ns, ds = [], []
    seen = 0
    for n in cands:
        n = int(n)
        seen += 1
        if limit is not None and seen > limit:
            break
        if n < 1 or (ns and n <= ns[-1]):
            continue
        from .numeric import affine_orbit_point
        dist = torus_dist(affine_orbit_point(x, zero, n))
        if _admissible(n, dist, len(ns), ds[-1] if ds else None, d, rho, C):
            ns.append(n)
            ds.append(dist)
            if len(ns) == K + 1:
                break
    return ns, ds


def _from_scan(x, B, K, rho, C):
    """Single greedy pass over ``n = 1..B`` on the integer orbit kernel."""
    d = x.dim
    plan = sup_plan(d)
    zero = _zero(d)
    Cn, Cd = C.numerator, C.denominator
    rn, rd = rho.numerator, rho.denominator

    def attempt(p):
        snap = snapshot([x, zero], p)
        Dd = snap.scale ** d
        ns, prev = [], None
        for n, (lo, hi) in zip(itertools.count(1), orbit_keys(snap, plan, 1, B)):
            k = len(ns)
            # n (key/D)^d <= C 2^-k  <=>  n key^d 2^k Cd <= Cn D^d
            lhs_hi = (n * hi ** d * Cd) << k
            lhs_lo = (n * lo ** d * Cd) << k
            if lhs_lo > Cn * Dd:
                continue
            if lhs_hi > Cn * Dd:
                raise Undecided(n)
            if prev is not None:
                if lo * rd > rn * prev[1]:
                    continue
                if hi * rd > rn * prev[0]:
                    raise Undecided(n)
            ns.append(n)
            prev = (lo, hi)
            if len(ns) == K + 1:
                break
        return ns

    ns = refine(attempt, start=scan_precision(B), what="subsequence scan")
    from .numeric import affine_orbit_point
    return ns, [torus_dist(affine_orbit_point(x, zero, n)) for n in ns]


def select_subsequence(x, source="designated", K: int = 5, rho=Fraction(1, 2),
                       C=Fraction(1)) -> ApproxSequence:
    """Greedily choose ``n_0 < ... < n_K`` (``K + 1`` terms) with
    ``n_k ||n_k x||^d <= C 2^-k`` and ``||n_k x|| <= rho ||n_{k-1} x||``.

    ``source`` is ``"designated"`` (Liouville denominators), an iterable of
    candidates, or :class:`Scan`.  Raises :class:`DomainError` when the
    source runs out first.
    """
    x = as_vector(x)
    K = int(K)
    if K < 1:
        raise DomainError("K must be at least 1")
    rho, C = Fraction(rho), Fraction(C)
    if not 0 < rho <= Fraction(1, 2):
        raise DomainError("rho must lie in (0, 1/2]")
    if C <= 0:
        raise DomainError("C must be positive")
    if isinstance(source, Scan):
        ns, ds = _from_scan(x, int(source.bound), K, rho, C)
        where = f"within bound B={source.bound}"
    elif source == "designated":
        ns, ds = _from_candidates(x, _designated(x), K, rho, C, limit=K + 4)
        where = "among the designated denominators"
    elif isinstance(source, str):
        raise DomainError(f"unknown source {source!r}")
    else:
        ns, ds = _from_candidates(x, source, K, rho, C)
        where = "among the supplied candidates"
    if len(ns) < K + 1:
        raise DomainError(f"no admissible n_{len(ns)} found {where} "
                          f"(x looks badly approximable at this scale)")
    return ApproxSequence(x, tuple(ns), tuple(ds), rho, C)


@dataclass
class WitnessCertificate:
    x: TorusVector
    seq: ApproxSequence
    a: list
    K_used: int
    y_truncated: TorusVector
    truncation_radius: Real
    tail_bound_per_K: list
    N: list = field(default_factory=list)

    def to_json(self, digits: int = 40) -> dict:
        pub = Fraction(1, 10 ** digits)
        radius = self.truncation_radius + pub
        return {
            "schema_version": SCHEMA_VERSION,
            "x": [format_real(c, digits) for c in self.x.coords],
            "n": list(self.seq.n),
            "a": [list(v) for v in self.a],
            "K": self.K_used,
            "y": {"mid": [format_real(c, digits) for c in self.y_truncated.coords],
                  "radius": _upper_str(radius),
                  "truncation_radius": _upper_str(self.truncation_radius)},
            "bounds": [{"K": K, "N_K": NK, "tail": _upper_str(t)}
                       for K, (NK, t) in enumerate(zip(self.N, self.tail_bound_per_K))],
        }


def _upper_str(v: Real, rel: Fraction = Fraction(1, 10 ** 4)) -> str:
    """A short decimal upper bound for a non-negative real, tight to ``rel``
    when the precision ceiling allows."""
    e = v.exact
    if e is not None:
        hi = e
    else:
        p, ceiling = get_precision()
        while True:
            lo, hi = v.enclose(p)
            if (lo > 0 and hi - lo <= rel * lo) or p >= ceiling:
                break
            p = min(2 * p, ceiling)
    if hi <= 0:
        return "0"
    exp = 0
    while hi * 10 ** exp < 1:
        exp += 1
    while hi * 10 ** exp >= 10:
        exp -= 1
    mant = -(-hi * 10 ** exp * 10 ** 5 // 1)
    return f"{mant / 10 ** 5:.5f}e{-exp:+d}"


def _tail_bounds(seq: ApproxSequence) -> list[Real]:
    """``T_K >= sum_{k>=K} ||n_k x||`` for ``K = 0..M+1``, continuing the
    known terms geometrically with ratio rho past ``n_M``."""
    ds = seq.dist
    M = len(ds) - 1
    extra = ds[M] * (seq.rho / (1 - seq.rho))
    out = [extra]
    acc = extra
    for k in range(M, -1, -1):
        acc = ds[k] + acc
        out.append(acc)
    return out[::-1]


def build_witness(x, seq: ApproxSequence, K: int) -> WitnessCertificate:
    """Truncate ``y = -sum_k (n_k x - a_k)`` after ``K`` terms.

    ``y_truncated = sum_{k<K} a_k - N_K x`` exactly; it differs from the
    full series by at most ``sum_{k>=K} ||n_k x||``.
    """
    x = as_vector(x)
    if x != seq.x:
        raise DomainError("sequence was selected for a different x")
    if K < 1 or seq.depth < K:
        raise DomainError(f"sequence has {len(seq.n)} terms, need at least K+1 = {K + 1}")
    d = x.dim
    a = [tuple(nearest_int(c * n) for c in x.coords) for n in seq.n]
    N = [0]
    for n in seq.n:
        N.append(N[-1] + n)
    A = [sum(a[k][i] for k in range(K)) for i in range(d)]
    y = TorusVector(tuple(Rat(A[i]) - x.coords[i] * N[K] for i in range(d)))
    tails = _tail_bounds(seq)
    return WitnessCertificate(x, seq, a, K, y, tails[K], tails, N)


def check_nearest_points(cert: WitnessCertificate) -> bool:
    """``||n_k x - a_k||_inf`` equals ``||n_k x||`` for every k.

    Certified coordinatewise: ``|n x_i - a_i| <= 1/2`` forces
    ``|n x_i - a_i| = ||n x_i||``, so the maxima agree."""
    half = Fraction(1, 2)
    for n, ak in zip(cert.seq.n, cert.a):
        for c, ai in zip(cert.x.coords, ak):
            diff = c * n - ai
            if compare(diff, half) > 0 or compare(diff, -half) < 0:
                return False
    return True


def orbit_bound_checks(cert: WitnessCertificate) -> list[tuple[int, Real, Real]]:
    """``(K, ||N_K x + y_trunc||, T_K + radius)`` for ``K <= K_used``, each
    certified ``<=``; raises :class:`CertificateRefuted` otherwise."""
    from .numeric import affine_orbit_point
    out = []
    for K in range(cert.K_used + 1):
        NK = cert.N[K]
        point = cert.y_truncated if NK == 0 else affine_orbit_point(cert.x, cert.y_truncated, NK)
        obs = torus_dist(point)
        bound = cert.tail_bound_per_K[K] + cert.truncation_radius
        if compare(obs, bound, contested=K) > 0:
            raise CertificateRefuted(f"orbit bound fails at K={K}")
        out.append((K, obs, bound))
    return out


def majorant(cert: WitnessCertificate, ell: int, N: int, spec: SumSpec | None = None
             ) -> tuple[Real, int]:
    """Upper bound for ``partial_S(x, y_trunc, ell, N)``: the head before the
    first ``N_K >= ell`` is evaluated directly, then every run
    ``[N_K, N_{K+1})`` contributes ``(T_K + radius)^e`` per term.  The last
    known return time covers the rest up to N.  Returns ``(bound, K_ell)``."""
    spec = spec or SumSpec.plain()
    _, e = spec.resolve(cert.x.dim)
    Ns = cert.N
    K_ell = next((K for K in range(1, len(Ns)) if Ns[K] >= ell), None)
    if K_ell is None or Ns[K_ell] > N:
        return partial_S(cert.x, cert.y_truncated, ell, N, spec), K_ell
    total = Rat(0)
    if Ns[K_ell] > ell:
        total = partial_S(cert.x, cert.y_truncated, ell, Ns[K_ell] - 1, spec)
    last = len(Ns) - 1
    for K in range(K_ell, last + 1):
        start = Ns[K]
        if start > N:
            break
        stop = N if K == last else min(Ns[K + 1] - 1, N)
        b = cert.tail_bound_per_K[K] + cert.truncation_radius
        total = total + (b ** e) * (stop - start + 1)
    return total, K_ell


def verify_witness(cert: WitnessCertificate, ell: int, N: int,
                   spec: SumSpec | None = None) -> SumReport:
    """Evaluate ``partial_S(x, y_trunc, ell, N)`` and certify it does not
    exceed :func:`majorant`.  Precision is raised until the comparison is
    decided; a violated bound raises :class:`CertificateRefuted`."""
    if ell < 1 or N < ell:
        raise DomainError("need 1 <= ell <= N")
    spec = spec or SumSpec.plain()
    orbit_bound_checks(cert)
    start, ceiling = get_precision()

    def attempt(p):
        with working_precision(p, ceiling):
            ps = partial_S(cert.x, cert.y_truncated, ell, N, spec)
            bound, K_ell = majorant(cert, ell, N, spec)
            r = try_compare(ps, bound, p)
        if r is None:
            raise Undecided(("majorant", N))
        return ps, bound, K_ell, r, p

    ps, bound, K_ell, r, p = refine(attempt, start=start, ceiling=ceiling,
                                    what="witness majorant")
    if r > 0:
        raise CertificateRefuted(f"certificate refuted at precision {p}: partial sum "
                                 f"{format_real(ps, 12)} exceeds majorant {format_real(bound, 12)}",
                                 precision=p)
    exact = ps.exact is not None and cert.truncation_radius.exact == 0
    return SumReport(spec.label, ell, [(N, ps)], [], "converging", exact=exact,
                     certificate={"kind": "witness majorant", "majorant": bound,
                                  "K_ell": K_ell, "precision": p})
