"""Deterministic text rendering in the expression grammar."""
from __future__ import annotations

from fractions import Fraction

from .core import NAMES, Expr, FieldAtom, JetAtom


def _rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _power(base: str, p) -> str:
    p = Fraction(p)
    if p == 1:
        return base
    if p.denominator == 1 and p > 0:
        return f"{base}^{p.numerator}"
    return f"{base}^({_rat(p)})"


def atom_text(a: JetAtom | FieldAtom) -> str:
    if isinstance(a, FieldAtom) or len(a) == 2:
        return f"{NAMES[a[0]]}[{a[1]}]"
    return str(a)


def _form_text(form: tuple) -> str:
    parts = []
    for f, c in form:
        name = atom_text(f)
        if c == 1:
            s = name
        elif c == -1:
            s = f"-{name}"
        else:
            s = f"{_rat(c)}*{name}"
        parts.append(s)
    out = parts[0]
    for s in parts[1:]:
        out += s if s.startswith("-") else "+" + s
    return out


def monomial_factors(key) -> list:
    """Non-numeric factors of a monomial, in canonical order."""
    (i, two, m, s1, s2), form, jets, word = key
    out = []
    if i:
        out.append("I")
    if two:
        out.append("2^(1/2)")
    for sym, e in (("m", m), ("s1", s1), ("s2", s2)):
        if e:
            out.append(_power(sym, Fraction(e, 2)))
    if form:
        out.append(f"exp({_form_text(form)})")
    for a, p in jets:
        out.append(_power(atom_text(a), p))
    out.extend(atom_text(a) for a in word)
    return out


def to_text(e: Expr) -> str:
    if not e.terms:
        return "0"
    pieces = []
    for key, c in e.sorted_terms():
        factors = monomial_factors(key)
        neg = c < 0
        a = -c if neg else c
        if not factors:
            body = _rat(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = _rat(a) + "*" + "*".join(factors)
        pieces.append(("-" if neg else "+", body))
    sign, body = pieces[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out
