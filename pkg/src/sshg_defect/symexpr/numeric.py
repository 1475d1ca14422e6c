"""Numerical evaluation of fermion-free expressions."""
from __future__ import annotations

import math
from typing import Callable, Mapping

import numpy as np

from .core import Expr, JetAtom


def _rad_value(r: tuple, m: float, s1: float, s2: float) -> complex:
    i, two, em, e1, e2 = r
    v = (1j if i else 1.0) * (math.sqrt(2.0) if two else 1.0)
    return v * m ** (em / 2) * s1 ** (e1 / 2) * s2 ** (e2 / 2)


def _lookup(values: Mapping, atom: JetAtom):
    if atom in values:
        return values[atom]
    if atom.dt == 0 and atom.dx == 0 and atom.base in values:
        return values[atom.base]
    raise KeyError(f"no value for {atom}")


def evaluate(e: Expr, values: Mapping, m: float, s1: float = 1.0, s2: float = 1.0):
    """Evaluate ``e`` with ``values`` keyed by FieldAtom/JetAtom (arrays allowed)."""
    total = 0.0
    for (r, form, jets, word), c in e.terms.items():
        if word:
            raise ValueError("cannot evaluate an expression containing odd generators")
        term = float(c) * _rad_value(r, m, s1, s2)
        if form:
            arg = 0.0
            for f, q in form:
                arg = arg + float(q) * _lookup(values, JetAtom(f.name, f.region, 0, 0))
            term = term * np.exp(arg)
        for a, p in jets:
            term = term * _lookup(values, a) ** p
        total = total + term
    if isinstance(total, complex) and total.imag == 0:
        return total.real
    if isinstance(total, np.ndarray) and np.iscomplexobj(total) and not np.any(total.imag):
        return total.real
    return total


def lambdify(e: Expr, args: list, m: float, s1: float = 1.0, s2: float = 1.0) -> Callable:
    """Return ``fn(*arrays)`` evaluating ``e`` with ``args`` (atoms) bound positionally."""
    args = [a if isinstance(a, JetAtom) else JetAtom(a.name, a.region, 0, 0) for a in args]

    def fn(*vals):
        return evaluate(e, dict(zip(args, vals)), m, s1, s2)
    return fn


__all__ = ["evaluate", "lambdify"]
