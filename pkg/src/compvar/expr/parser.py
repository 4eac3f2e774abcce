"""Recursive-descent parser for the expression grammar.

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := atom ("^" exponent)?
    exponent := "-" exponent | power
    atom     := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")"

Power binds tighter than prefix minus, which binds tighter than * and /. There is
no implicit multiplication.
"""

import re
from collections.abc import Sequence
from dataclasses import dataclass

from ..core.exceptions import ExpressionSyntaxError, UnknownFunctionError, UnknownVariableError
from .nodes import FUNCTIONS, Binary, Const, Expr, Unary, Var

_TOKEN_PATTERN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(source: str) -> list[Token]:
    """Split source text into tokens, ending with an "end" token."""
    tokens: list[Token] = []
    position = 0
    while position < len(source):
        match = _TOKEN_PATTERN.match(source, position)
        if match is None:
            raise ExpressionSyntaxError(f"Unexpected character {source[position]!r}", source, position)
        kind = match.lastgroup or ""
        if kind != "ws":
            tokens.append(Token(kind, match.group(), position))
        position = match.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class Parser:
    """Parser for one source string over a declared variable list."""

    def __init__(self, source: str, variables: Sequence[str]) -> None:
        self.source = source
        self.variables = tuple(variables)
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def _error(self, message: str, token: Token | None = None) -> ExpressionSyntaxError:
        token = token or self.current
        return ExpressionSyntaxError(message, self.source, token.position)

    def _expect(self, text: str) -> Token:
        if self.current.text != text or self.current.kind != "op":
            found = "end of input" if self.current.kind == "end" else repr(self.current.text)
            raise self._error(f"Expected '{text}' but found {found}")
        return self._advance()

    def parse(self) -> Expr:
        if self.current.kind == "end":
            raise self._error("Empty expression")
        expr = self._expr()
        if self.current.kind != "end":
            raise self._error(f"Unexpected token {self.current.text!r}")
        return expr

    def _expr(self) -> Expr:
        expr = self._term()
        while self.current.kind == "op" and self.current.text in ("+", "-"):
            op = self._advance().text
            expr = Binary(op, expr, self._term())
        return expr

    def _term(self) -> Expr:
        expr = self._unary()
        while self.current.kind == "op" and self.current.text in ("*", "/"):
            op = self._advance().text
            expr = Binary(op, expr, self._unary())
        return expr

    def _unary(self) -> Expr:
        if self.current.kind == "op" and self.current.text == "-":
            self._advance()
            return Unary("neg", self._unary())
        return self._power()

    def _power(self) -> Expr:
        base = self._atom()
        if self.current.kind == "op" and self.current.text == "^":
            self._advance()
            return Binary("^", base, self._exponent())
        return base

    def _exponent(self) -> Expr:
        if self.current.kind == "op" and self.current.text == "-":
            self._advance()
            return Unary("neg", self._exponent())
        return self._power()

    def _atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self._advance()
            return Const(float(token.text))
        if token.kind == "name":
            self._advance()
            if self.current.kind == "op" and self.current.text == "(":
                if token.text not in FUNCTIONS:
                    raise UnknownFunctionError(token.text, token.position)
                self._advance()
                argument = self._expr()
                self._expect(")")
                return Unary(token.text, argument)
            if token.text not in self.variables:
                raise UnknownVariableError(token.text, self.variables, token.position)
            return Var(token.text)
        if token.kind == "op" and token.text == "(":
            self._advance()
            expr = self._expr()
            self._expect(")")
            return expr
        if token.kind == "end":
            raise self._error("Unexpected end of input")
        raise self._error(f"Unexpected token {token.text!r}")


def parse(source: str, variables: Sequence[str]) -> Expr:
    """Parse source text into an expression tree over the declared variables."""
    return Parser(source, variables).parse()
