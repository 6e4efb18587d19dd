"""Recursive-descent parser for rational-function strings.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/' | <implicit>) unary)*
    unary  := ('+' | '-') unary | power
    power  := atom (('^' | '**') integer)?
    atom   := integer | name | '(' expr ')'

Implicit multiplication covers ``2x`` and ``3(x+1)``.  Rational constants
are written as quotients, e.g. ``1/2*x``.
"""

from __future__ import annotations

import re
from typing import List, Sequence, Tuple

from .poly import MultiPoly
from .ratfunc import RatFunc


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> List[Tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r} at offset {pos} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.vars = tuple(variables)
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op: str):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r} in {self.text!r}")

    def parse(self) -> RatFunc:
        if not self.toks:
            raise ParseError("empty expression")
        r = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input {self.toks[self.i][1]!r} in {self.text!r}")
        return r

    def expr(self) -> RatFunc:
        r = self.term()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                r = r + t if val == "+" else r - t
            else:
                return r

    def term(self) -> RatFunc:
        r = self.unary()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                r = r * self.unary()
            elif kind == "op" and val == "/":
                self.take()
                d = self.unary()
                if d.is_zero():
                    raise ParseError(f"division by zero in {self.text!r}")
                r = r / d
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                r = r * self.power()
            else:
                return r

    def unary(self) -> RatFunc:
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            u = self.unary()
            return -u if val == "-" else u
        return self.power()

    def power(self) -> RatFunc:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val in ("^", "**"):
            self.take()
            neg = False
            k2, v2 = self.peek()
            if k2 == "op" and v2 == "-":
                self.take()
                neg = True
            k3, v3 = self.take()
            if k3 != "num":
                raise ParseError(f"integer exponent expected in {self.text!r}")
            e = int(v3)
            if neg:
                if base.is_zero():
                    raise ParseError(f"division by zero in {self.text!r}")
                return base.inverse() ** e
            return base ** e
        return base

    def atom(self) -> RatFunc:
        kind, val = self.take()
        if kind == "num":
            return RatFunc.const(self.vars, int(val))
        if kind == "name":
            if val not in self.vars:
                raise ParseError(f"unknown variable {val!r} (field variables: {', '.join(self.vars)})")
            return RatFunc.var(self.vars, val)
        if kind == "op" and val == "(":
            r = self.expr()
            self.expect(")")
            return r
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")


def parse_ratfunc(text: str, variables: Sequence[str]) -> RatFunc:
    if not isinstance(text, str):
        if isinstance(text, int):
            return RatFunc.const(variables, text)
        raise ParseError(f"expected a rational-function string, got {text!r}")
    return _Parser(text, variables).parse()


def parse_poly(text: str, variables: Sequence[str]) -> MultiPoly:
    r = parse_ratfunc(text, variables)
    if not r.den.is_constant():
        raise ParseError(f"{text!r} is not a polynomial")
    return r.num * (1 / r.den.constant_value())
