"""Exact Grassmann-graded computer algebra over jet space."""
from .core import (
    CHI, CHIBAR, EVEN_NAMES, F, G, I, M, NAMES, PHI, PSI, PSIBAR, S1, S2, SQRT2, VARPHI,
    Expr, FieldAtom, JetAtom, const, cosh, exp, field_atom, fld, linear_form, parity_of,
    sinh, sqrt, total,
)
from .calculus import (
    LEFT, RIGHT, basis_derive, boson_derive, d_minus, d_plus, drop_fermions, dt, dx,
    grassmann_derive, jet_derive, map_fields, minus_combo, plus_combo, prolong, set_zero,
    substitute_even_jet, substitute_odd, total_derivative,
)
from .rewrite import CyclicRules, NonTerminating, Rule, RewriteSystem, contains_any, substitute
from .parser import ParseError, UnknownSymbol, parse
from .printer import to_text
from .numeric import evaluate, lambdify


def normalize(raw) -> Expr:
    """Canonical sum of ``(coeff, factors)`` pairs, factors multiplied left to right."""
    out = Expr()
    for coeff, factors in raw:
        term = Expr.const(1) * coeff if not isinstance(coeff, Expr) else coeff
        for f in factors:
            term = term * f
        out = out + term
    return out


def mul(a: Expr, b: Expr) -> Expr:
    return a * b


def to_print(e: Expr) -> str:
    return to_text(e)
