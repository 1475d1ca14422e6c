"""Short constructors for the fields and parameters of the model."""
from __future__ import annotations

from fractions import Fraction

from .symexpr import Expr, I, M, S1, S2, SQRT2, cosh, exp, fld, sinh

HALF = Fraction(1, 2)


def phi(r: int, dt: int = 0, dx: int = 0) -> Expr:
    return fld("phi", r, dt, dx)


def vphi(r: int, dt: int = 0, dx: int = 0) -> Expr:
    return fld("varphi", r, dt, dx)


def psi(r: int, dt: int = 0, dx: int = 0) -> Expr:
    return fld("psi", r, dt, dx)


def psib(r: int, dt: int = 0, dx: int = 0) -> Expr:
    return fld("psibar", r, dt, dx)


def chi(r: int, dt: int = 0, dx: int = 0) -> Expr:
    return fld("chi", r, dt, dx)


def chib(r: int, dt: int = 0, dx: int = 0) -> Expr:
    return fld("chibar", r, dt, dx)


def f(k: int, dt: int = 0, dx: int = 0) -> Expr:
    return fld("f", k, dt, dx)


def g(k: int, dt: int = 0, dx: int = 0) -> Expr:
    return fld("g", k, dt, dx)


def plus(make, dt: int = 0, dx: int = 0) -> Expr:
    """X_+ = X_1 + X_2."""
    return make(1, dt, dx) + make(2, dt, dx)


def minus(make, dt: int = 0, dx: int = 0) -> Expr:
    """X_- = X_1 - X_2."""
    return make(1, dt, dx) - make(2, dt, dx)


def sigma(k: int) -> Expr:
    return S1 if k == 1 else S2


def sqrt_sigma(k: int, power: int = 1) -> Expr:
    """sigma_k ** (power/2)."""
    return Expr.radical(s1=power) if k == 1 else Expr.radical(s2=power)


SQRT_M = Expr.radical(m=1)

__all__ = [
    "HALF", "I", "M", "S1", "S2", "SQRT2", "SQRT_M", "Expr", "chi", "chib", "cosh", "exp",
    "f", "g", "minus", "phi", "plus", "psi", "psib", "sigma", "sinh", "sqrt_sigma", "vphi",
]
