"""A small recursive-descent parser for the package's textual literals.

Grammar::

    expr    := [sign] term (sign term)*
    term    := power ('*' power)*
    power   := atom ['^' exponent]
    atom    := INT ['/' INT] | NAME | '(' expr ')'
    exponent:= ['-'] INT | '(' ['-'] INT ')'

Names are resolved by an environment callback ``symbol(name, exponent)`` so a
name raised to a negative power (``d^-1``, ``z^-2``) can be built directly.
A trailing ``(mod v^K)`` suffix is split off by ``split_modulus``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+)?'*)|(?P<op>[-+*/^()]))")
_MOD = re.compile(r"\(\s*mod\s+(?P<var>[A-Za-z]+)\s*\^\s*\(?\s*(?P<exp>-?\d+)\s*\)?\s*\)\s*$")


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", text, bad,
                             "a number, a name or an operator")
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), start))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


def split_modulus(text: str) -> tuple[str, str | None, int | None]:
    """Strip a trailing ``(mod v^K)``; return (body, v, K)."""
    m = _MOD.search(text)
    if not m:
        return text, None, None
    return text[: m.start()].rstrip(), m.group("var"), int(m.group("exp"))


class Parser:
    """Evaluate an expression with ring operations supplied by the caller.

    ``number(Fraction)`` and ``symbol(name, exponent)`` build ring elements;
    the elements themselves must support ``+``, ``-``, ``*`` and negation.
    """

    def __init__(self, text: str, number: Callable, symbol: Callable):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.number = number
        self.symbol = symbol

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, tok: Token, expected: str):
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {what}", self.text, tok.pos, expected)

    def expect_op(self, op: str) -> Token:
        tok = self.take()
        if tok.kind != "op" or tok.text != op:
            self.fail(tok, repr(op))
        return tok

    def parse(self):
        if self.peek().kind == "end":
            self.fail(self.peek(), "an expression")
        value = self.expr()
        if self.peek().kind != "end":
            self.fail(self.peek(), "an operator or end of input")
        return value

    def expr(self):
        tok = self.peek()
        negate = False
        if tok.kind == "op" and tok.text in "+-":
            self.take()
            negate = tok.text == "-"
        value = self.term()
        if negate:
            value = -value
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if tok.text == "+" else value - rhs
            else:
                return value

    def term(self):
        value = self.power()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            value = value * self.power()
        return value

    def exponent(self) -> int:
        paren = False
        if self.peek().kind == "op" and self.peek().text == "(":
            self.take()
            paren = True
        sign = 1
        if self.peek().kind == "op" and self.peek().text == "-":
            self.take()
            sign = -1
        tok = self.take()
        if tok.kind != "int":
            self.fail(tok, "an integer exponent")
        if paren:
            self.expect_op(")")
        return sign * int(tok.text)

    def power(self):
        tok = self.take()
        if tok.kind == "int":
            value = Fraction(int(tok.text))
            if self.peek().kind == "op" and self.peek().text == "/":
                self.take()
                den = self.take()
                if den.kind != "int":
                    self.fail(den, "an integer denominator")
                if int(den.text) == 0:
                    raise ParseError("zero denominator", self.text, den.pos, "a nonzero integer")
                value = value / int(den.text)
            result = self.number(value)
            if self.peek().kind == "op" and self.peek().text == "^":
                self.take()
                result = self.number(value ** self.exponent())
            return result
        if tok.kind == "name":
            exp = 1
            if self.peek().kind == "op" and self.peek().text == "^":
                self.take()
                exp = self.exponent()
            try:
                return self.symbol(tok.text, exp)
            except ParseError:
                raise
            except (KeyError, ValueError) as exc:
                raise ParseError(f"cannot use {tok.text!r} here: {exc}", self.text, tok.pos,
                                 "a known symbol") from None
        if tok.kind == "op" and tok.text == "(":
            value = self.expr()
            self.expect_op(")")
            if self.peek().kind == "op" and self.peek().text == "^":
                self.take()
                exp_tok = self.peek()
                exp = self.exponent()
                if exp < 0:
                    raise ParseError("negative power of a parenthesised expression", self.text,
                                     exp_tok.pos, "a non-negative exponent")
                result = self.number(Fraction(1))
                for _ in range(exp):
                    result = result * value
                return result
            return value
        self.fail(tok, "a number, a name or '('")


def evaluate(text: str, number: Callable, symbol: Callable):
    return Parser(text, number, symbol).parse()


class Aligned:
    """Wrapper that truncates both operands to a common order before each
    operation, so intermediate products of polar terms can be parsed."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def _pair(self, other):
        a, b = self.value, other.value
        if hasattr(a, "aligned_with"):
            return a.aligned_with(b)
        n = min(a.order, b.order)
        return a.truncate(n), b.truncate(n)

    def __add__(self, other):
        a, b = self._pair(other)
        return Aligned(a + b)

    def __sub__(self, other):
        a, b = self._pair(other)
        return Aligned(a - b)

    def __mul__(self, other):
        a, b = self._pair(other)
        return Aligned(a * b)

    def __neg__(self):
        return Aligned(-self.value)


def evaluate_aligned(text: str, number: Callable, symbol: Callable):
    """``evaluate`` for truncated objects whose precision varies under products."""
    return Parser(text, lambda c: Aligned(number(c)), lambda n, e: Aligned(symbol(n, e))).parse().value


def parse_series(text: str, order: int = 8):
    from .series import TruncatedSeries

    body, var, mod = split_modulus(text)
    if var is not None:
        if var != "x":
            raise ParseError(f"modulus variable {var!r} is not x", text, 0, "(mod x^K)")
        order = mod - 1

    def symbol(name, exp):
        if name != "x":
            raise KeyError(f"unknown variable {name!r}")
        if exp < 0:
            raise ValueError("negative power of x in a power series")
        return TruncatedSeries.monomial(exp, order)

    value = evaluate_aligned(body, lambda c: TruncatedSeries.constant(c, order), symbol)
    return value


def parse_laurent(text: str, order: int = 12):
    from .series import TruncatedLaurent

    body, var, mod = split_modulus(text)
    if var is not None:
        if var != "z":
            raise ParseError(f"modulus variable {var!r} is not z", text, 0, "(mod z^K)")
        order = mod - 1

    # products of polar terms must not lose precision while parsing
    work = order + 64

    def symbol(name, exp):
        if name != "z":
            raise KeyError(f"unknown variable {name!r}")
        return TruncatedLaurent.monomial(exp, work)

    raw = evaluate_aligned(body, lambda c: TruncatedLaurent(0, (c,), work), symbol)
    if raw.order < order:
        raise ParseError("expression loses precision below the requested order", text, 0,
                         "a polynomial in z and z^-1")
    return raw.truncate(order)
