"""Recursive-descent parser for the expression grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | factor
    factor := base ('^' ['-'] integer)?
    base   := number | name | "y'" | '(' expr ')' | func '(' expr ')'
    number := integer ('/' integer)?

A literal ``p/q`` is read as one rational constant unless it is the right
operand of ``/`` or the denominator carries an exponent, so ``x/2/3`` and
``2/3^2`` keep their usual left-associative meaning.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from ..errors import ParseError, UndeclaredSymbolError
from .nodes import KERNEL_HEADS, X, Y, YP, YPP, Add, Const, Div, Expr, Func, Mul, Pow, Sym
from .printer import parser_negate

RESERVED = {X, Y} | set(KERNEL_HEADS)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<float>\d+\.\d*|\.\d+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*(?:'{1,2})?)
  | (?P<op>\*\*|[-+*/^()=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str, offset: int = 0) -> list[Token]:
    try:
        return _tokenize(text)
    except ParseError as exc:
        raise ParseError(exc.message, exc.pos + offset) from None


def _tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "float":
            raise ParseError("floating-point literals are not supported; use p/q", pos)
        if kind == "op" and m.group() == "**":
            raise ParseError("use '^' for powers", pos)
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class Parser:
    def __init__(
        self, text: str, params: Iterable[str] = (), allow_second: bool = False, offset: int = 0
    ):
        self.text = text
        self.offset = offset
        self.params = frozenset(params)
        bad = self.params & (RESERVED | {YP, YPP})
        if bad:
            raise ValueError(f"parameter names clash with reserved names: {sorted(bad)}")
        self.allow_second = allow_second
        self.tokens = [
            Token(t.kind, t.text, t.pos + offset) for t in tokenize(text, offset)
        ]
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", self.tok.pos)
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            t = self.term()
            terms.append(t if op == "+" else parser_negate(t))
        if len(terms) == 1:
            return terms[0]
        flat: list[Expr] = []
        for t in terms:
            flat.extend(t.args if isinstance(t, Add) else (t,))
        return Add(flat)

    def term(self) -> Expr:
        acc = self.unary(after_div=False)
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            rhs = self.unary(after_div=op == "/")
            if op == "*":
                left = acc.args if isinstance(acc, Mul) else (acc,)
                right = rhs.args if isinstance(rhs, Mul) else (rhs,)
                acc = Mul(left + right)
            else:
                acc = Div(acc, rhs)
        return acc

    def unary(self, after_div: bool) -> Expr:
        if self.tok.text == "-":
            self.advance()
            return parser_negate(self.unary(after_div))
        if self.tok.text == "+":
            self.advance()
            return self.unary(after_div)
        return self.factor(after_div)

    def factor(self, after_div: bool) -> Expr:
        base = self.base(after_div)
        if self.tok.text == "^":
            self.advance()
            sign = 1
            if self.tok.text == "-":
                self.advance()
                sign = -1
            if self.tok.kind != "int":
                raise ParseError("non-integer exponent: only integer powers are allowed", self.tok.pos)
            n = sign * int(self.advance().text)
            if self.tok.text == "^":
                raise ParseError("chained exponents need parentheses", self.tok.pos)
            return Pow(base, n)
        return base

    def base(self, after_div: bool) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.advance()
            value = Fraction(int(t.text))
            if (
                not after_div
                and self.tok.text == "/"
                and self.peek().kind == "int"
                and self.peek(2).text != "^"
            ):
                self.advance()
                den = int(self.advance().text)
                if den == 0:
                    raise ParseError("zero denominator in rational literal", t.pos)
                value /= den
            return Const(value)
        if t.kind == "name":
            return self.name()
        if t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        found = t.text or "end of input"
        raise ParseError(f"unexpected {found!r}", t.pos)

    def name(self) -> Expr:
        t = self.advance()
        name = t.text
        if name in KERNEL_HEADS:
            if self.tok.text != "(":
                raise ParseError(f"function {name!r} needs a parenthesised argument", self.tok.pos)
            self.advance()
            arg = self.expr()
            self.expect(")")
            return Func(name, arg)
        if name in (X, Y, YP):
            return Sym(name)
        if name == YPP:
            if not self.allow_second:
                raise ParseError("y'' is only allowed in equations", t.pos)
            return Sym(name)
        if name.endswith("'"):
            raise UndeclaredSymbolError(name, t.pos)
        if name in self.params:
            return Sym(name)
        raise UndeclaredSymbolError(name, t.pos)


def parse_expr(text: str, params: Iterable[str] = ()) -> Expr:
    """Parse ``text`` into an expression tree over x, y, y' and ``params``."""
    return Parser(text, params).parse()


def parse_equation(text: str, params: Iterable[str] = ()) -> Expr:
    """Parse ``lhs = rhs`` (y'' allowed) and return ``lhs - rhs``.

    Text without ``=`` is read as ``text = 0``.
    """
    pieces = text.split("=")
    if len(pieces) > 2:
        raise ParseError("an equation has exactly one '='", text.index("=", text.index("=") + 1))
    lhs = Parser(pieces[0], params, allow_second=True).parse()
    if len(pieces) == 1:
        return lhs
    rhs = Parser(pieces[1], params, allow_second=True, offset=len(pieces[0]) + 1).parse()
    if isinstance(rhs, Const) and rhs.value == 0:
        return lhs
    return Add((lhs, parser_negate(rhs)))
