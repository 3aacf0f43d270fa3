"""Recursive-descent parser for rational expressions over a chart.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' uint)?
    base   := int | ident | '(' expr ')' | '-' factor
"""
from __future__ import annotations

import re

from ..errors import DivisionByZeroPolynomial, ExprSyntaxError, UnknownCoordinate
from .ratfn import Chart, RatFn

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S)")


def _tokenize(text):
    tokens = []
    for m in _TOKEN.finditer(text):
        start = m.start()
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", text, start)
            tokens.append((ch, ch, start))
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, chart):
        self.text = text
        self.chart = chart
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(message, self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression")
        value = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek()[0] in ("*", "/"):
            tok = self.take()
            rhs = self.factor()
            if tok[0] == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise DivisionByZeroPolynomial(
                        f"division by a zero polynomial at position {tok[2]} in {self.text!r}"
                    )
                value = value / rhs
        return value

    def factor(self):
        value = self.base()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                self.fail("expected a non-negative integer exponent")
            self.take()
            value = value ** int(tok[1])
        return value

    def base(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "int":
            self.take()
            return RatFn.constant(self.chart, int(tok[1]))
        if kind == "ident":
            self.take()
            if tok[1] not in self.chart.coords:
                raise UnknownCoordinate(
                    f"unknown coordinate {tok[1]!r} at position {tok[2]} "
                    f"(chart {self.chart.name} has {list(self.chart.coords)})"
                )
            return RatFn.coordinate(self.chart, tok[1])
        if kind == "(":
            self.take()
            value = self.expr()
            if self.peek()[0] != ")":
                self.fail("expected ')'")
            self.take()
            return value
        if kind == "-":
            self.take()
            return -self.factor()
        if kind == "end":
            self.fail("unexpected end of expression")
        self.fail(f"unexpected {tok[1]!r}")


def parse_expr(text: str, chart: Chart) -> RatFn:
    """Parse ``text`` into a reduced rational function on ``chart``."""
    return _Parser(text, chart).parse()
