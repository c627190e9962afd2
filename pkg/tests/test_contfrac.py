from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from inhomlab.contfrac import (ContinuedFraction, cf_expand, convergents,
                               golden_ratio, make_bounded_quotient, make_liouville,
                               sqrt2)
from inhomlab.errors import DomainError, PrecisionExhausted
from inhomlab.numeric import Ball, Rat, working_precision

from oracles import contains, mp_phi


def euclid(f: Fraction):
    out = []
    while True:
        a = f.numerator // f.denominator
        out.append(a)
        f -= a
        if f == 0:
            return out
        f = 1 / f


@given(st.fractions(min_value=-50, max_value=50, max_denominator=10 ** 6))
def test_rational_expansion_matches_euclid(f):
    cf = cf_expand(Rat(f), 100)
    assert cf.terms(100) == euclid(f)
    assert cf.value.exact == f
    assert cf.complete


def test_known_expansions():
    assert cf_expand(Rat(Fraction(355, 113)), 10).terms(10) == [3, 7, 16]
    assert cf_expand(golden_ratio(), 12).terms(12) == [1] * 12
    assert cf_expand(Rat(2) ** Fraction(1, 2), 25).terms(25) == [1] + [2] * 24


def test_canonical_form_merges_trailing_one():
    cf = ContinuedFraction.finite([0, 2, 1])
    assert cf.terms(5) == [0, 3]
    assert cf.value.exact == Fraction(1, 3)


def test_convergents_of_golden_ratio_are_fibonacci_ratios():
    fib = [1, 1]
    while len(fib) < 22:
        fib.append(fib[-1] + fib[-2])
    cs = convergents(ContinuedFraction(1, (), (1,)), 20)
    assert [(c.p, c.q) for c in cs] == [(fib[i + 1], fib[i]) for i in range(20)]


def test_convergents_of_finite_expansion_run_out():
    with pytest.raises(DomainError):
        convergents(ContinuedFraction.finite([3, 7, 16]), 5)


def test_periodic_values_enclose_mpmath():
    with mpmath.workprec(500):
        assert contains(golden_ratio(), mp_phi(150), 400)
        assert contains(sqrt2(), mpmath.sqrt(2), 400)
        e3 = ContinuedFraction(0, (2,), (1, 3))
        # [0; 2, (1, 3)] = 1 / (2 + t), t = [0; (1, 3)] solves t = 1/(1 + 1/(3 + t))
        t = (-3 + mpmath.sqrt(21)) / 2
        assert contains(e3.value, 1 / (2 + t), 400)


def test_interval_expansion_needs_enough_precision():
    near = Ball(Fraction(1, 2), Fraction(1, 10 ** 40))
    with working_precision(64, 256):
        with pytest.raises(PrecisionExhausted):
            cf_expand(near, 6)
    mid, rad = Fraction(31415926535, 10 ** 10), Fraction(1, 10 ** 20)
    lo, hi = euclid(mid - rad), euclid(mid + rad)
    assert lo[:6] == hi[:6]
    assert cf_expand(Ball(mid, rad), 6).terms(6) == lo[:6]


def test_bounded_quotient_generators():
    assert make_bounded_quotient(3).terms(5) == [0, 3, 3, 3, 3]
    assert make_bounded_quotient(3, "cycle").terms(8) == [0, 1, 2, 3, 1, 2, 3, 1]
    cf = make_bounded_quotient(1, a0=1, prefix=(2,))
    assert cf.terms(5) == [1, 2, 1, 1, 1]
    ruled = make_bounded_quotient(2, lambda i: 1 + i % 2)
    assert ruled.terms(5) == [0, 2, 1, 2, 1]
    bad = make_bounded_quotient(2, lambda i: i)
    with pytest.raises(DomainError):
        bad.terms(5)
    with pytest.raises(DomainError):
        make_bounded_quotient(0)


def test_liouville_enclosure_and_distance_bounds():
    L = make_liouville("factorial")
    with mpmath.workprec(900):
        true = mpmath.fsum(mpmath.mpf(2) ** (-mpmath.factorial(j)) for j in range(1, 7))
        assert contains(L, true, 600)
        for j, n in enumerate(L.denominators(4), start=1):
            d = abs(n * true - mpmath.nint(n * true))
            b = L.distance_bound(j)
            assert d <= mpmath.mpf(b.numerator) / b.denominator


def test_liouville_schedules():
    assert make_liouville("pow2").denominators(3) == [4, 16, 256]
    with pytest.raises(DomainError):
        make_liouville("linear")
    with pytest.raises(DomainError):
        make_liouville("nonsense")
    custom = make_liouville(("cube", lambda j: j ** 3))
    assert custom.denominators(2) == [2, 256]


def test_literal_rendering():
    assert ContinuedFraction(1, (2,), (1, 3)).literal() == "cf:[1;2,(1,3)]"
    assert ContinuedFraction.finite([3, 7, 16]).literal() == "cf:[3;7,16]"


def test_quotients_must_be_positive():
    with pytest.raises(DomainError):
        ContinuedFraction(0, (0,))
