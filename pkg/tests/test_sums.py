from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from inhomlab.contfrac import golden_ratio, sqrt2
from inhomlab.errors import DimensionMismatch, DomainError
from inhomlab.numeric import Rat, TorusVector, compare
from inhomlab.records import scan_records
from inhomlab.sums import (SumSpec, divergence_diagnostic, partial_S,
                           partial_S_records, record_increments)

from oracles import brute_S, brute_S_mp, contains, dist1, mp_dist, mp_phi

unit = st.fractions(min_value=0, max_value=1, max_denominator=30)


def vec(*vals):
    return TorusVector(tuple(Rat(Fraction(v)) for v in vals))


@st.composite
def pair(draw):
    d = draw(st.sampled_from([1, 2]))
    return (tuple(draw(unit) % 1 for _ in range(d)), tuple(draw(unit) % 1 for _ in range(d)))


@given(pair(), st.integers(1, 5), st.integers(0, 250))
def test_partial_sum_matches_brute_force(p, ell, extra):
    x, y = p
    N = ell + extra
    assert partial_S(vec(*x), vec(*y), ell, N).exact == brute_S(x, y, ell, N)


@given(pair(), st.integers(1, 5), st.integers(0, 250))
def test_direct_and_record_formulas_agree(p, ell, extra):
    x, y = p
    N = ell + extra
    rs = scan_records(vec(*x), vec(*y), N, start=ell)
    assert partial_S_records(rs, ell, N).exact == partial_S(vec(*x), vec(*y), ell, N).exact


def test_sigma_regime_against_mpmath():
    x, y = (Fraction(5, 19),), (Fraction(1, 3),)
    spec = SumSpec.with_sigma(Fraction(3, 2))
    v = partial_S(vec(*x), vec(*y), 2, 300, spec)
    with mpmath.workdps(50):
        assert contains(v, brute_S_mp(x, y, 2, 300, Fraction(2, 3)), 150)
    rs = scan_records(vec(*x), vec(*y), 300, start=2)
    w = partial_S_records(rs, 2, 300, spec)
    assert compare(w, Fraction(0)) > 0
    with mpmath.workdps(50):
        assert contains(w, brute_S_mp(x, y, 2, 300, Fraction(2, 3)), 150)


def test_weighted_regime_against_mpmath():
    x, y = (Fraction(2, 11), Fraction(3, 7)), (Fraction(1, 5), Fraction(0))
    r = (Fraction(1, 4), Fraction(3, 4))
    v = partial_S(vec(*x), vec(*y), 1, 400, SumSpec.weighted(r))
    with mpmath.workdps(50):
        assert contains(v, brute_S_mp(x, y, 1, 400, Fraction(2), weights=r), 150)


def test_irrational_partial_sum_against_mpmath():
    v = partial_S(TorusVector((golden_ratio(),)), vec(Fraction(1, 4)), 1, 2000)
    rs = scan_records(TorusVector((golden_ratio(),)), vec(Fraction(1, 4)), 2000)
    w = partial_S_records(rs, 1, 2000)
    with mpmath.workdps(40):
        phi, y = mp_phi(40), mpmath.mpf(1) / 4
        total, cur = mpmath.mpf(0), None
        for n in range(1, 2001):
            d = mp_dist(n * phi + y)
            cur = d if cur is None else min(cur, d)
            total += cur
        assert contains(v, total, 120) and contains(w, total, 120)


def test_uniform_weights_and_sigma_one_over_d_equal_plain():
    x, y = vec(Fraction(3, 13), Fraction(4, 9)), vec(Fraction(1, 6), Fraction(1, 2))
    plain = partial_S(x, y, 1, 500)
    assert compare(partial_S(x, y, 1, 500, SumSpec.weighted([Fraction(1, 2)] * 2)), plain) == 0
    assert compare(partial_S(x, y, 1, 500, SumSpec.with_sigma(Fraction(1, 2))), plain) == 0


def test_golden_increments():
    # increments of the sum at the Fibonacci records of ||n phi||
    rs = scan_records(TorusVector((golden_ratio(),)), vec(0), 10 ** 4)
    incs = record_increments(rs, 10 ** 4)
    assert [k for k, _ in incs] == list(range(1, len(incs) + 1))
    with mpmath.workdps(40):
        phi = mp_phi(40)
        for (k, inc), (t, t2) in zip(incs, zip(rs.times, rs.times[1:])):
            assert contains(inc, mp_dist(t * phi) * (t2 - t), 100)


def test_example_sums():
    # ||n/2|| alternates 1/2, 0: the running minimum is 0 from n = 2
    assert partial_S(vec(Fraction(1, 2)), vec(0), 1, 100).exact == Fraction(1, 2)
    # x = 1/3, y = 1/2 never hits an integer; the minimum 1/6 recurs
    v = partial_S(vec(Fraction(1, 3)), vec(Fraction(1, 2)), 1, 60).exact
    assert v == brute_S((Fraction(1, 3),), (Fraction(1, 2),), 1, 60)
    assert v == Fraction(1, 6) * 60


def test_record_sum_requires_matching_scan():
    rs = scan_records(vec(Fraction(1, 7)), vec(Fraction(1, 3)), 50, start=2)
    with pytest.raises(DomainError):
        partial_S_records(rs, 1, 50)
    with pytest.raises(DomainError):
        partial_S_records(rs, 2, 80)
    with pytest.raises(DomainError):
        partial_S_records(rs, 2, 50, SumSpec.weighted([Fraction(1)]))
    with pytest.raises(DomainError):
        partial_S(vec(0), vec(0), 5, 4)
    with pytest.raises(DimensionMismatch):
        partial_S(vec(0), vec(0), 1, 4, SumSpec.plain(2))
    with pytest.raises(DomainError):
        SumSpec.with_sigma(Fraction(1, 3)).resolve(2)
    with pytest.raises(DomainError):
        SumSpec("other")


def test_diagnostic_exact_verdicts():
    conv = divergence_diagnostic(vec(Fraction(1, 3)), vec(Fraction(2, 3)), 1, [10, 100])
    assert conv.exact and conv.verdict_hint == "converging"
    assert conv.certificate["kind"] == "converged exactly"
    div = divergence_diagnostic(vec(Fraction(1, 4)), vec(Fraction(1, 8)), 1, [10, 100])
    assert div.exact and div.verdict_hint == "diverging"
    assert div.certificate["min_dist"] == Fraction(1, 8)
    late = divergence_diagnostic(vec(Fraction(2, 5), Fraction(1, 3)),
                                 vec(Fraction(1, 5), Fraction(0)), 4, [10, 40])
    # 2n/5 + 1/5 and n/3 integral at n = 12 (mod 15)
    assert late.certificate == {"kind": "converged exactly", "zero_at": 12,
                                "value": late.certificate["value"]}


def test_diagnostic_heuristics():
    gold = divergence_diagnostic(TorusVector((golden_ratio(),)), vec(Fraction(1, 3)), 1,
                                 [10 ** 2, 10 ** 3, 10 ** 4])
    assert not gold.exact and gold.verdict_hint == "diverging"
    root = divergence_diagnostic(TorusVector((sqrt2(),)), vec(0), 1, [10, 10 ** 3])
    assert root.verdict_hint == "diverging" and not root.exact
    with pytest.raises(DomainError):
        divergence_diagnostic(vec(0), vec(0), 1, [10, 5])


def test_single_term_sum():
    x, y = Fraction(3, 8), Fraction(1, 5)
    assert partial_S(vec(x), vec(y), 3, 3).exact == dist1(3 * x + y)
