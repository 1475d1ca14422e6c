"""Recursive-descent parser for the expression grammar.

Identifiers ``phi varphi psi psibar chi chibar f g`` take a region tag
``[0|1|2]``; ``dt(...)`` and ``dx(...)`` are total derivatives; ``exp cosh sinh
sqrt`` are expanded on the spot; ``I m s1 s2`` are the symbolic constants.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

from .calculus import total_derivative
from .core import NAME_INDEX, Expr, I, M, S1, S2, field_atom

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")
_FUNCS = ("exp", "cosh", "sinh", "sqrt", "dt", "dx")
_CONSTS = {"I": I, "m": M, "s1": S1, "s2": S2}


class ParseError(SyntaxError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text[:pos]}<<>>{text[pos:]}")
        self.pos = pos
        self.text_in = text


class UnknownSymbol(ParseError):
    pass


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        mt = _TOKEN.match(text, pos)
        if mt is None:
            break
        num, ident, op = mt.groups()
        start = mt.start(mt.lastindex) if mt.lastindex else pos
        if num is not None:
            toks.append(("num", int(num), start))
        elif ident is not None:
            toks.append(("id", ident, start))
        elif op is not None:
            if op.isspace():
                pos = mt.end()
                continue
            toks.append(("op", op, start))
        pos = mt.end()
    toks.append(("end", None, n))
    return toks


class _Parser:
    def __init__(self, text: str, aliases: Mapping[str, Expr] | None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.aliases = aliases or {}

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, self.text, tok[2])

    def expect(self, op: str):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise self.error(f"expected {op!r}", t)
        return t

    def at_op(self, *ops) -> bool:
        t = self.peek()
        return t[0] == "op" and t[1] in ops

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error("unexpected token")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.at_op("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.at_op("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op[1] == "*":
                e = e * rhs
            else:
                if not rhs.is_coefficient_monomial():
                    raise self.error("division by a non-constant expression", op)
                e = e * rhs.inverse()
        return e

    def unary(self) -> Expr:
        if self.at_op("-"):
            self.take()
            return -self.unary()
        if self.at_op("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.at_op("^"):
            tok = self.take()
            p = self._exponent(tok)
            if p.denominator == 1 and p >= 0:
                return base ** int(p)
            if not base.is_coefficient_monomial():
                raise self.error("non-integer power of a non-constant expression", tok)
            try:
                return base.coefficient_power(p)
            except ValueError as exc:
                raise self.error(str(exc), tok) from None
        return base

    def _exponent(self, tok) -> Fraction:
        e = self.unary() if self.at_op("-") else self.primary()
        if not e.terms:
            return Fraction(0)
        if len(e.terms) != 1:
            raise self.error("exponent must be a rational number", tok)
        (key, c), = e.terms.items()
        if key != ((0, 0, 0, 0, 0), (), (), ()):
            raise self.error("exponent must be a rational number", tok)
        return c

    def primary(self) -> Expr:
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return Expr.const(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "id":
            if val in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return self._apply(val, arg, t)
            if val in _CONSTS:
                return _CONSTS[val]
            if val in NAME_INDEX:
                self.expect("[")
                r = self.take()
                if r[0] != "num":
                    raise self.error("expected region tag", r)
                self.expect("]")
                try:
                    fa = field_atom(val, r[1])
                except ValueError as exc:
                    raise self.error(str(exc), r) from None
                return Expr.field(fa.name, fa.region)
            if val in self.aliases:
                return self.aliases[val]
            raise UnknownSymbol(f"unknown symbol {val!r}", self.text, pos)
        raise self.error("unexpected token", t)

    def _apply(self, fn: str, arg: Expr, tok) -> Expr:
        try:
            if fn == "dt":
                return total_derivative(arg, "t")
            if fn == "dx":
                return total_derivative(arg, "x")
            if fn == "sqrt":
                return arg.coefficient_power(Fraction(1, 2))
            return getattr(Expr, fn)(arg)
        except ValueError as exc:
            raise self.error(f"{fn}: {exc}", tok) from None


def parse(text: str, aliases: Mapping[str, Expr] | None = None) -> Expr:
    """Parse ``text``; ``aliases`` maps extra identifiers to expressions."""
    return _Parser(text, aliases).parse()
