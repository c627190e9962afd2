"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (lines are printed even without ``-s``) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest  # noqa: E402

from inhomlab.contfrac import golden_ratio, make_liouville, sqrt2  # noqa: E402
from inhomlab.errors import DomainError  # noqa: E402
from inhomlab.numeric import Rat, TorusVector, compare, format_real  # noqa: E402
from inhomlab.psi import (PowerLaw, ReciprocalSeq, Table, discretize_reciprocal,  # noqa: E402
                          killer_psi, membership_W, psi_power, transform_contract,
                          transform_dilate)
from inhomlab.rational import RationalPair, contains_integer_point, s_finite  # noqa: E402
from inhomlab.records import best_constant, scan_records  # noqa: E402
from inhomlab.sums import (SumSpec, partial_S, partial_S_records,  # noqa: E402
                           record_increments)
from inhomlab.witness import (Scan, build_witness, orbit_bound_checks,  # noqa: E402
                              select_subsequence, verify_witness)

from oracles import brute_S, dist1, integer_point_brute, sup_dist  # noqa: E402

SEED = 20240611


def vec(vals):
    return TorusVector(tuple(Rat(Fraction(v)) for v in vals))


def rand_frac(rng, max_den):
    q = rng.randint(1, max_den)
    return Fraction(rng.randrange(q), q)


def float_min_n_dist(alpha: float, B: int) -> tuple[float, int]:
    """Double-precision scan of ``min n ||n alpha||``; accurate to ~1e-9 here."""
    best, arg = 1.0, 0
    for n in range(1, B + 1):
        f = (n * alpha) % 1.0
        v = n * min(f, 1.0 - f)
        if v < best:
            best, arg = v, n
    return best, arg


# -- criteria ---------------------------------------------------------------------

def check_1():
    vals = [Fraction(p, q) for q in range(1, 21) for p in range(20)]
    t0 = time.perf_counter()
    pairs = mismatched_hit = mismatched_finite = 0
    for i, x in enumerate(vals):
        vx = TorusVector((Rat(x),))
        P = x.denominator
        for j, y in enumerate(vals):
            pair = RationalPair((x,), (y,))
            least = integer_point_brute((x,), (y,))
            hit = contains_integer_point(pair)
            if hit.found != (least is not None) or (least is not None and hit.least_n != least):
                mismatched_hit += 1
            ell = 1 + (i + j) % 3
            vy = TorusVector((Rat(y),))
            one = partial_S(vx, vy, ell, ell + P).exact
            two = partial_S(vx, vy, ell, ell + 2 * P).exact
            if s_finite(pair, ell) != (one == two):
                mismatched_finite += 1
            pairs += 1
    dt = time.perf_counter() - t0
    ok = mismatched_hit == 0 and mismatched_finite == 0 and dt < 60
    return ok, (f"{pairs} pairs, integer-point mismatches {mismatched_hit}, "
                f"finiteness mismatches {mismatched_finite}, {dt:.1f}s (limit 60s)")


def check_2():
    t0 = time.perf_counter()
    phi = golden_ratio()
    N = 10 ** 6
    rs = scan_records(TorusVector((phi,)), vec([0]), N)
    incs = record_increments(rs, N)
    threshold = 1 - 2 / (phi * phi)
    tail = [(k, v) for k, v in incs if k >= 5]
    below = [k for k, v in tail if compare(v, threshold) <= 0]
    # partial sum over the first K records is the sum of their increments
    short = []
    for K in range(1, len(incs) + 1):
        total = partial_S_records(rs, 1, rs.times[K] - 1)
        if compare(total, Fraction(23, 100) * (K - 5)) < 0:
            short.append(K)
    dt = time.perf_counter() - t0
    worst = min((v for _, v in tail), key=lambda v: float(v))
    ok = not below and not short and len(tail) > 0 and dt < 30
    return ok, (f"{len(tail)} increments with k>=5, min {format_real(worst, 6)} > "
                f"1-2/phi^2 = {format_real(threshold, 6)}; failures {below}; "
                f"partial-sum bound failures {short}; {dt:.1f}s (limit 30s)")


def check_3():
    rng = random.Random(SEED + 3)
    N = 10 ** 4
    t0 = time.perf_counter()
    bad = 0
    for _ in range(500):
        d = rng.choice([1, 2])
        x = [rand_frac(rng, 60) for _ in range(d)]
        y = [rand_frac(rng, 60) for _ in range(d)]
        vx, vy = vec(x), vec(y)
        for ell in (1, 2, 5):
            rs = scan_records(vx, vy, N, start=ell)
            a = partial_S(vx, vy, ell, N).exact
            b = partial_S_records(rs, ell, N).exact
            if a is None or a != b:
                bad += 1
    dt = time.perf_counter() - t0
    return bad == 0 and dt < 120, f"1500 comparisons, {bad} mismatches, {dt:.1f}s (limit 120s)"


def check_4():
    rng = random.Random(SEED + 4)
    bad_ineq = bad_shift = 0
    for _ in range(200):
        d = rng.choice([1, 2])
        x = [rand_frac(rng, 30) for _ in range(d)]
        y = [rand_frac(rng, 30) for _ in range(d)]
        ell, k = rng.randint(1, 6), rng.randint(1, 12)
        N = ell + rng.randint(1, 300)
        vx, vy = vec(x), vec(y)
        lhs = partial_S(vx, vy, ell, N).exact
        first = sup_dist(x, y, ell) ** d
        if not lhs <= first + partial_S(vx, vy, ell + 1, N).exact:
            bad_ineq += 1
        shifted = vec([k * a + b for a, b in zip(x, y)])
        if partial_S(vx, vy, ell + k, N + k).exact != partial_S(vx, shifted, ell, N).exact:
            bad_shift += 1
        # the library sum itself against brute force
        if lhs != brute_S(tuple(x), tuple(y), ell, N):
            bad_ineq += 1
    ok = bad_ineq == 0 and bad_shift == 0
    return ok, f"200 instances, inequality failures {bad_ineq}, shift-identity failures {bad_shift}"


def check_5():
    t0 = time.perf_counter()
    x = TorusVector((make_liouville("factorial"),))
    seq = select_subsequence(x, "designated", K=5)
    cert = build_witness(x, seq, 5)
    checks = orbit_bound_checks(cert)
    rep = verify_witness(cert, 1, 10 ** 5)
    ps = rep.partial_sums[0][1]
    maj = rep.certificate["majorant"]
    pipeline = (rep.verdict_hint == "converging" and compare(ps, maj) <= 0
                and [K for K, _, _ in checks] == list(range(6)))
    rejected, consts = [], []
    for name, make, alpha in (("phi", golden_ratio, (1 + math.sqrt(5)) / 2),
                              ("sqrt2", sqrt2, math.sqrt(2))):
        try:
            select_subsequence(TorusVector((make(),)), Scan(10 ** 6), K=5)
        except DomainError:
            rejected.append(name)
        n_lib, c_lib = best_constant(TorusVector((make(),)), 10 ** 6)
        c_float, n_float = float_min_n_dist(alpha, 10 ** 6)
        if n_lib != n_float or abs(float(c_lib) - c_float) > 1e-8:
            rejected.append(f"{name}: constant mismatch")
        consts.append(f"min n||n {name}|| = {format_real(c_lib, 6)} at n={n_lib}")
    dt = time.perf_counter() - t0
    ok = pipeline and rejected == ["phi", "sqrt2"] and dt < 60
    return ok, (f"Liouville K=5 verified at {rep.certificate['precision']} bits, partial "
                f"{format_real(ps, 8)} <= majorant {format_real(maj, 8)}, orbit bounds K<=5 hold; "
                f"rejected with B=10^6: {rejected}; {'; '.join(consts)} "
                f"(the quoted 0.44 is the asymptotic 1/sqrt5, not the finite minimum); "
                f"{dt:.1f}s (limit 60s)")


def _random_psi(rng):
    kind = rng.choice(["pow", "table", "recip", "killer", "powof"])
    if kind == "pow":
        return PowerLaw(Fraction(rng.randint(1, 40), rng.randint(1, 20)),
                        Fraction(rng.randint(0, 12), rng.randint(1, 6)))
    if kind == "table":
        vals = sorted((Fraction(rng.randint(1, 50), rng.randint(1, 60)) for _ in range(rng.randint(1, 30))),
                      reverse=True)
        return Table(vals)
    if kind == "recip":
        return ReciprocalSeq(sorted(rng.randint(1, 400) for _ in range(rng.randint(1, 40))))
    if kind == "killer":
        while True:
            x, y = rand_frac(rng, 25), rand_frac(rng, 25)
            if not contains_integer_point(RationalPair((x,), (y,))):
                return killer_psi(vec([x]), vec([y]), rng.randint(1, 5))
    return psi_power(PowerLaw(Fraction(rng.randint(1, 9), rng.randint(1, 9)), Fraction(1, 2)),
                     Fraction(rng.randint(1, 6), rng.randint(1, 4)))


def check_6():
    rng = random.Random(SEED + 6)
    dom_fail = 0
    for _ in range(50):
        psi = _random_psi(rng)
        k = discretize_reciprocal(psi, 1000)
        for n in range(1, 1001):
            kn = k.k[n - 1]
            if compare(Rat(Fraction(1, kn)), psi(n)) > 0:
                dom_fail += 1
        k.check_prefix(1000)
    kill_fail = 0
    for _ in range(100):
        d = rng.choice([1, 2])
        x = [rand_frac(rng, 30) for _ in range(d)]
        y = [rand_frac(rng, 30) for _ in range(d)]
        ell = rng.randint(1, 10)
        psi = killer_psi(vec(x), vec(y), ell)
        if any(n >= ell for n in membership_W(vec(x), vec(y), psi, 400)):
            kill_fail += 1
    transport_fail = transported = 0
    for _ in range(100):
        x, y = rand_frac(rng, 30), rand_frac(rng, 30)
        u, v = rng.randint(1, 5), rng.randint(1, 5)
        psi = PowerLaw(Fraction(rng.randint(1, 4), 2), Fraction(rng.randint(0, 2), 2))
        for n in membership_W(vec([x]), vec([y]), transform_contract(psi, u), 150):
            transported += 1
            m = u * n
            if compare(Rat(sup_dist((x,), (u * y,), m)), psi(m)) >= 0:
                transport_fail += 1
        for n in membership_W(vec([x]), vec([y]), transform_dilate(psi, v), 150):
            transported += 1
            m = v * n
            if compare(Rat(dist1(m * (x / v) + y)), psi(m)) >= 0:
                transport_fail += 1
    ok = dom_fail == 0 and kill_fail == 0 and transport_fail == 0 and transported > 0
    return ok, (f"domination failures {dom_fail}/50000, killer exclusions violated {kill_fail}/100, "
                f"transport failures {transport_fail}/{transported} solutions")


def check_7():
    rng = random.Random(SEED + 7)
    bad = 0
    for _ in range(100):
        d = rng.choice([1, 2, 3])
        x = [rand_frac(rng, 40) for _ in range(d)]
        y = [rand_frac(rng, 40) for _ in range(d)]
        ell = rng.randint(1, 5)
        N = ell + rng.randint(1, 2000)
        vx, vy = vec(x), vec(y)
        plain = partial_S(vx, vy, ell, N).exact
        sig = partial_S(vx, vy, ell, N, SumSpec.with_sigma(Fraction(1, d))).exact
        uni = partial_S(vx, vy, ell, N, SumSpec.weighted([Fraction(1, d)] * d)).exact
        if plain is None or not plain == sig == uni:
            bad += 1
    return bad == 0, f"100 instances, {bad} disagreements"


def check_8():
    rng = random.Random(SEED + 8)
    t0 = time.perf_counter()
    phi = golden_ratio()
    B = 10 ** 6
    n_c, c = best_constant(TorusVector((phi,)), B)
    bound = Fraction(99, 100) * c
    pairs = fails = 0
    worst = None
    for _ in range(50):
        y = rand_frac(rng, 1000)
        rs = scan_records(TorusVector((phi,)), vec([y]), B)
        for k in range(len(rs.records) - 1):
            lhs = (rs.times[k + 1] - rs.times[k]) * 2 * rs.delta(k)
            pairs += 1
            if compare(lhs, bound) < 0:
                fails += 1
            if worst is None or float(lhs) < worst:
                worst = float(lhs)
    dt = time.perf_counter() - t0
    return fails == 0, (f"c = {format_real(c, 6)} (n={n_c}), {pairs} record pairs, "
                        f"min (t_(k+1)-t_k)*2*delta_k = {worst:.6f} >= 0.99c, {fails} failures, {dt:.1f}s")


CHECKS = {1: check_1, 2: check_2, 3: check_3, 4: check_4,
          5: check_5, 6: check_6, 7: check_7, 8: check_8}


def line(n, ok, detail):
    return f"criterion {n}: {'PASS' if ok else 'FAIL'}: {detail}"


@pytest.mark.parametrize("n", sorted(CHECKS))
def test_criterion(n, capsys):
    ok, detail = CHECKS[n]()
    with capsys.disabled():
        print("\n" + line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, fn in sorted(CHECKS.items()):
        ok, detail = fn()
        failed += not ok
        print(line(n, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
