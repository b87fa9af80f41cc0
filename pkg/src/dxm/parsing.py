"""Recursive-descent parser for rational maps in z.

Grammar (whitespace ignored, implicit multiplication allowed):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/' | <implicit>) unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := NUMBER ['i'] | 'i' | 'z' | '(' expr ')'

Decimal literals are read exactly, so '0.5' and '1/2' give the same map.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

from . import poly
from .gaussian import GaussianRational
from .maps import RationalMap, reduce

_NUMBER = re.compile(r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?")
_MINUS = str.maketrans({"−": "-", "·": "*", "×": "*"})


class ParseError(ValueError):
    def __init__(self, msg: str, offset: int, text: str = ""):
        super().__init__(f"{msg} at offset {offset}")
        self.offset = offset
        self.text = text


ONE = (GaussianRational(1),)


def _rat_add(a, b, sign=1):
    n = poly.add(poly.mul(a[0], b[1]), poly.scale(poly.mul(b[0], a[1]), sign))
    return n, poly.mul(a[1], b[1])


def _rat_mul(a, b):
    return poly.mul(a[0], b[0]), poly.mul(a[1], b[1])


def _rat_div(a, b):
    if not b[0]:
        raise ZeroDivisionError
    return poly.mul(a[0], b[1]), poly.mul(a[1], b[0])


class _Parser:
    def __init__(self, text: str):
        self.src = text
        self.s = text.translate(_MINUS)
        self.i = 0

    def error(self, msg, at=None):
        raise ParseError(msg, self.i if at is None else at, self.src)

    def peek(self) -> str:
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1
        return self.s[self.i] if self.i < len(self.s) else ""

    def take(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}" if self.peek() else f"expected {ch!r}, got end of input")
        self.i += 1

    def parse(self):
        if not self.peek():
            self.error("empty expression")
        v = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek() in ("+", "-") and self.peek():
            op = self.s[self.i]
            self.i += 1
            v = _rat_add(v, self.term(), 1 if op == "+" else -1)
        return v

    def term(self):
        v = self.unary()
        while True:
            c = self.peek()
            if c in ("*", "/") and c:
                at = self.i
                self.i += 1
                rhs = self.unary()
                if c == "*":
                    v = _rat_mul(v, rhs)
                else:
                    try:
                        v = _rat_div(v, rhs)
                    except ZeroDivisionError:
                        self.error("division by zero", at)
            elif c and (c.isdigit() or c in "z(i."):
                v = _rat_mul(v, self.power())
            else:
                return v

    def unary(self):
        c = self.peek()
        if c in ("+", "-") and c:
            self.i += 1
            v = self.unary()
            return (poly.scale(v[0], -1), v[1]) if c == "-" else v
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() != "^":
            return base
        self.i += 1
        neg = False
        if self.peek() == "-":
            neg = True
            self.i += 1
        self.peek()
        m = re.compile(r"\d+").match(self.s, self.i)
        if not m:
            self.error("expected an integer exponent")
        self.i = m.end()
        k = int(m.group())
        n, d = poly.power(base[0], k) if k else ONE, poly.power(base[1], k) if k else ONE
        if neg:
            if not n:
                self.error("zero to a negative power", m.start())
            n, d = d, n
        return n, d

    def atom(self):
        c = self.peek()
        if not c:
            self.error("unexpected end of input")
        if c == "(":
            self.i += 1
            v = self.expr()
            self.take(")")
            return v
        if c == "z":
            self.i += 1
            return (GaussianRational(0), GaussianRational(1)), ONE
        if c == "i":
            self.i += 1
            return (GaussianRational(0, 1),), ONE
        m = _NUMBER.match(self.s, self.i)
        if not m:
            self.error(f"unexpected {c!r}")
        self.i = m.end()
        val = Fraction(m.group())
        if self.i < len(self.s) and self.s[self.i] == "i":
            self.i += 1
            return poly.trim((GaussianRational(0, val),)), ONE
        return poly.trim((GaussianRational(val),)), ONE


def parse_rational(text: str) -> RationalMap:
    """Parse without any self-map validation (used for plain functions)."""
    num, den = _Parser(text).parse()
    if not den:
        raise ParseError("denominator vanishes identically", 0, text)
    return reduce(RationalMap(num or (GaussianRational(0),), den))


def parse_map(text: str, X=None, validate: bool = True) -> RationalMap:
    """Parse and (by default) check phi is a self-map of X."""
    m = parse_rational(text)
    if not validate:
        return m
    from .discdyn import validate_self_map
    return validate_self_map(m.num, m.den, X)


def parse_coefficients(text: str) -> tuple:
    """Comma-separated ascending coefficients, each a constant expression."""
    out = []
    for part in text.split(","):
        m = parse_rational(part)
        if len(m.num) > 1 or len(m.den) > 1:
            raise ParseError("coefficient lists take constants only", 0, part)
        out.append(m.num[0] / m.den[0] if m.num else GaussianRational(0))
    return tuple(out)


def parse_poly_or_coeffs(text: str) -> tuple:
    """An expression in z (must be a polynomial) or a coefficient list."""
    if "z" not in text:
        return parse_coefficients(text)
    m = parse_rational(text)
    if len(m.den) != 1:
        raise ParseError("expected a polynomial", 0, text)
    return tuple(c / m.den[0] for c in m.num)


def map_from_parts(num_text: str, den_text: Optional[str] = "1", X=None,
                   validate: bool = True) -> RationalMap:
    num = parse_poly_or_coeffs(num_text)
    den = parse_poly_or_coeffs(den_text or "1")
    if validate:
        from .discdyn import validate_self_map
        return validate_self_map(num, den, X)
    return reduce(RationalMap(num, den))
