"""The number and vector literal grammar shared by every CLI surface.

::

    rat:p/q                 exact rational (rat:p also accepted)
    cf:[a0;a1,a2,...]       finite continued fraction
    cf:[a0;a1,(b1,...,bm)]  eventually periodic continued fraction
    dec:0.1234~1e-30        decimal midpoint ~ radius (radius optional)
    liouville:NAME          sum_j 2**-g(j), NAME in factorial|pow2|square|linear
    (lit,lit,...)           vector; a bare literal is a 1-vector
"""

from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from .contfrac import ContinuedFraction, make_liouville
from .errors import DomainError, LiteralParseError
from .numeric import Ball, Rat, Real, TorusVector

_INT = re.compile(r"[+-]?\d+\Z")


def split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside brackets and parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise LiteralParseError(f"unbalanced brackets in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise LiteralParseError(f"unbalanced brackets in {text!r}")
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_fraction(text: str) -> Fraction:
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise LiteralParseError(f"not a rational number: {text!r}") from exc


def _parse_int(text: str) -> int:
    text = text.strip()
    if not _INT.match(text):
        raise LiteralParseError(f"not an integer: {text!r}")
    return int(text)


def parse_cf(body: str) -> ContinuedFraction:
    body = body.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise LiteralParseError(f"continued fraction must be bracketed: {body!r}")
    inner = body[1:-1]
    head, _, tail = inner.partition(";")
    a0 = _parse_int(head)
    prefix, period = [], None
    if tail.strip():
        items = split_top(tail)
        for k, item in enumerate(items):
            if item.startswith("("):
                if k != len(items) - 1 or not item.endswith(")"):
                    raise LiteralParseError(f"period must be the last item: {body!r}")
                period = tuple(_parse_int(t) for t in item[1:-1].split(","))
            else:
                prefix.append(_parse_int(item))
    try:
        if period is None:
            return ContinuedFraction.finite([a0] + prefix)
        return ContinuedFraction(a0, tuple(prefix), period)
    except DomainError as exc:
        raise LiteralParseError(str(exc)) from exc


def parse_number(text: str) -> Real:
    text = text.strip()
    kind, sep, body = text.partition(":")
    if not sep:
        raise LiteralParseError(
            f"number literal needs a kind prefix (rat:, cf:, dec:, liouville:): {text!r}")
    if kind == "rat":
        return Rat(parse_fraction(body))
    if kind == "cf":
        cf = parse_cf(body)
        return Rat(cf.value.exact) if cf.is_finite else cf.value
    if kind == "dec":
        mid, _, rad = body.partition("~")
        try:
            m = Fraction(Decimal(mid.strip()))
            r = Fraction(Decimal(rad.strip())) if rad.strip() else Fraction(0)
        except (InvalidOperation, ValueError) as exc:
            raise LiteralParseError(f"bad decimal literal {text!r}") from exc
        if r < 0:
            raise LiteralParseError(f"negative radius in {text!r}")
        return Rat(m) if r == 0 else Ball(m, r)
    if kind == "liouville":
        try:
            return make_liouville(body.strip())
        except DomainError as exc:
            raise LiteralParseError(str(exc)) from exc
    raise LiteralParseError(f"unknown number kind {kind!r} in {text!r}")


def parse_vector(text: str) -> TorusVector:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        items = split_top(text[1:-1])
        if not all(items):
            raise LiteralParseError(f"empty component in vector {text!r}")
        return TorusVector(tuple(parse_number(t) for t in items))
    return TorusVector((parse_number(text),))


def format_exact(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"
