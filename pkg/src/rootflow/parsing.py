"""Recursive-descent parser for the polynomial expression grammar.

Grammar::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' uint)?
    base   := symbol | literal | '(' expr ')'

Complex literals take the forms ``a``, ``bi``, ``a+bi``, ``a-bi`` with
decimal reals (the additive forms fall out of the grammar; the lexer only
has to recognize ``<number>`` and ``<number>i``).
"""

from __future__ import annotations

import re
from typing import Sequence

from .poly import MultiPoly


class PolyParseError(ValueError):
    """Syntax or symbol error, carrying the offending source position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UndeclaredSymbolError(PolyParseError):
    pass


_NUMBER = re.compile(r"(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*^()":
            tokens.append(("op", ch, i))
            i += 1
            continue
        m = _NUMBER.match(source, i)
        if m:
            text = m.group(0)
            j = m.end()
            # a number immediately followed by a bare 'i' is an imaginary literal
            if j < n and source[j] == "i" and (j + 1 >= n or not (source[j + 1].isalnum() or source[j + 1] == "_")):
                tokens.append(("imag", text, i))
                i = j + 1
            else:
                tokens.append(("num", text, i))
                i = j
            continue
        m = _IDENT.match(source, i)
        if m:
            tokens.append(("sym", m.group(0), i))
            i = m.end()
            continue
        raise PolyParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str, variables: tuple[str, ...]):
        self.tokens = _tokenize(source)
        self.pos = 0
        self.variables = variables

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, at = self.peek()
        if kind != "op" or text != op:
            raise PolyParseError(f"expected {op!r}, found {text or 'end of input'!r}", at)
        self.advance()

    def parse_expr(self) -> MultiPoly:
        kind, text, _ = self.peek()
        negate = False
        if kind == "op" and text in "+-":
            negate = text == "-"
            self.advance()
        acc = self.parse_term()
        if negate:
            acc = -acc
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.parse_term()
                acc = acc - rhs if text == "-" else acc + rhs
            else:
                return acc

    def parse_term(self) -> MultiPoly:
        acc = self.parse_factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text == "*":
                self.advance()
                acc = acc * self.parse_factor()
            else:
                return acc

    def parse_factor(self) -> MultiPoly:
        base = self.parse_base()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            kind, text, at = self.peek()
            if kind == "op" and text == "-":
                raise PolyParseError("exponent must be a non-negative integer", at)
            if kind != "num" or not text.isdigit():
                raise PolyParseError("exponent must be a non-negative integer", at)
            self.advance()
            return base ** int(text)
        return base

    def parse_base(self) -> MultiPoly:
        kind, text, at = self.advance()
        if kind == "num":
            return MultiPoly.const(self.variables, float(text))
        if kind == "imag":
            return MultiPoly.const(self.variables, float(text) * 1j)
        if kind == "sym":
            if text not in self.variables:
                raise UndeclaredSymbolError(f"undeclared symbol {text!r}", at)
            return MultiPoly.var(self.variables, text)
        if kind == "op" and text == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise PolyParseError(f"unexpected {text or 'end of input'!r}", at)


def parse_poly(source: str, variables: Sequence[str]) -> MultiPoly:
    """Parse an expression over the declared variables into a MultiPoly."""
    parser = _Parser(source, tuple(variables))
    result = parser.parse_expr()
    kind, text, at = parser.peek()
    if kind != "end":
        raise PolyParseError(f"trailing input {text!r}", at)
    return result
