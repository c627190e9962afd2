from fractions import Fraction

import pytest

from inhomlab.contfrac import LiouvilleReal
from inhomlab.errors import LiteralParseError
from inhomlab.literals import parse_cf, parse_number, parse_vector, split_top
from inhomlab.numeric import compare


def test_rational_and_decimal_literals():
    assert parse_number("rat:3/4").exact == Fraction(3, 4)
    assert parse_number("rat:-2").exact == -2
    assert parse_number("dec:0.125").exact == Fraction(1, 8)
    ball = parse_number("dec:0.1~1e-20")
    lo, hi = ball.enclose(64)
    assert lo == Fraction(1, 10) - Fraction(1, 10 ** 20)


def test_cf_literals():
    assert parse_number("cf:[3;7,16]").exact == Fraction(355, 113)
    phi = parse_number("cf:[1;(1)]")
    assert compare(phi, Fraction(1618033988, 10 ** 9)) > 0
    assert parse_cf("[2]").terms(3) == [2]
    assert parse_cf("[0;1,(2,3)]").terms(6) == [0, 1, 2, 3, 2, 3]


def test_liouville_literal():
    assert isinstance(parse_number("liouville:factorial"), LiouvilleReal)


def test_vectors():
    v = parse_vector("(rat:1/2, cf:[0;(1)])")
    assert v.dim == 2 and v.coords[0].exact == Fraction(1, 2)
    assert parse_vector("rat:1/3").dim == 1
    assert split_top("a,(b,c),[d,e]") == ["a", "(b,c)", "[d,e]"]


@pytest.mark.parametrize("text", [
    "3/4", "rat:", "rat:1/0", "cf:[1;0]", "cf:1;2", "cf:[1;(2),3]", "dec:abc",
    "dec:1~-1", "liouville:linear", "foo:1", "(rat:1,)", "(rat:1",
])
def test_malformed_literals(text):
    with pytest.raises(LiteralParseError):
        parse_vector(text)
