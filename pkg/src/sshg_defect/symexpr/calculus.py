"""Graded partial derivatives, total derivatives and field substitutions."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from .core import (
    ONE, ONE_RAD, ZERO, Expr, FieldAtom, JetAtom, jets_mul, sort_word,
)

LEFT, RIGHT = "left", "right"


def _check_side(side: str) -> None:
    if side not in (LEFT, RIGHT):
        raise ValueError(f"derivative side must be 'left' or 'right', got {side!r}")


def grassmann_derive(e: Expr, g: JetAtom, side: str = LEFT) -> Expr:
    """Derivative with respect to the odd atom ``g``; left mode gives d_g(g w) = w."""
    _check_side(side)
    if not g.odd:
        raise ValueError("grassmann_derive needs an odd atom")
    out: dict = {}
    for (r, ex, j, w), c in e.terms.items():
        if g not in w:
            continue
        p = w.index(g)
        n_after = len(w) - 1 - p
        flips = p if side == LEFT else n_after
        key = (r, ex, j, w[:p] + w[p + 1:])
        v = out.get(key, ZERO) + (-c if flips & 1 else c)
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return Expr(out, _trusted=True)


def boson_derive(e: Expr, b: FieldAtom) -> Expr:
    """Partial derivative with respect to an undifferentiated even field.

    Acts on exponential forms through their linear coefficient and on
    polynomial occurrences of the order-0 jet; derivative jets are untouched.
    """
    b = FieldAtom(b[0], b[1])
    if b.odd:
        raise ValueError("boson_derive needs an even field")
    atom0 = JetAtom(b.name, b.region, 0, 0)
    out: dict = {}

    def add(key, v):
        w = out.get(key, ZERO) + v
        if w:
            out[key] = w
        else:
            out.pop(key, None)

    for (r, ex, j, w), c in e.terms.items():
        for f, coef in ex:
            if f == b:
                add((r, ex, j, w), c * coef)
                break
        for idx, (a, p) in enumerate(j):
            if a == atom0:
                nj = j[:idx] + (((a, p - 1),) if p > 1 else ()) + j[idx + 1:]
                add((r, ex, nj, w), c * p)
                break
    return Expr(out, _trusted=True)


def jet_derive(e: Expr, atom: JetAtom, side: str = LEFT) -> Expr:
    """Partial derivative with respect to any jet coordinate (odd or even)."""
    if atom.odd:
        return grassmann_derive(e, atom, side)
    if atom.dt == 0 and atom.dx == 0:
        return boson_derive(e, atom.base)
    out: dict = {}
    for (r, ex, j, w), c in e.terms.items():
        for idx, (a, p) in enumerate(j):
            if a == atom:
                nj = j[:idx] + (((a, p - 1),) if p > 1 else ()) + j[idx + 1:]
                key = (r, ex, nj, w)
                v = out.get(key, ZERO) + c * p
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
                break
    return Expr(out, _trusted=True)


def basis_derive(e: Expr, combo: Mapping[JetAtom, Fraction], side: str = LEFT) -> Expr:
    """Derivative along a linear combination of coordinates, e.g. d/d(phi_+)."""
    out = Expr()
    for atom, w in combo.items():
        out = out + jet_derive(e, atom, side).scale(w)
    return out


def plus_combo(name: int, dt: int = 0, dx: int = 0) -> dict:
    """Coordinates for d/dX_+ where X_+ = X_1 + X_2 (so d/dX_+ = (d_1 + d_2)/2)."""
    h = Fraction(1, 2)
    return {JetAtom(name, 1, dt, dx): h, JetAtom(name, 2, dt, dx): h}


def minus_combo(name: int, dt: int = 0, dx: int = 0) -> dict:
    h = Fraction(1, 2)
    return {JetAtom(name, 1, dt, dx): h, JetAtom(name, 2, dt, dx): -h}


# ---------------------------------------------------------------- total derivatives

_DIRS = {"t": (1, 0), "x": (0, 1)}


def total_derivative(e: Expr, direction: str) -> Expr:
    """Jet prolongation D_t or D_x (chain rule on exponentials, Leibniz on jets)."""
    if direction not in _DIRS:
        raise ValueError(f"direction must be 't' or 'x', got {direction!r}")
    dt, dx = _DIRS[direction]
    out: dict = {}

    def add(key, v):
        w = out.get(key, ZERO) + v
        if w:
            out[key] = w
        else:
            out.pop(key, None)

    for (r, ex, j, w), c in e.terms.items():
        for f, coef in ex:
            new = JetAtom(f.name, f.region, dt, dx)
            add((r, ex, jets_mul(j, ((new, 1),)), w), c * coef)
        for idx, (a, p) in enumerate(j):
            rest = j[:idx] + (((a, p - 1),) if p > 1 else ()) + j[idx + 1:]
            new = JetAtom(a.name, a.region, a.dt + dt, a.dx + dx)
            add((r, ex, jets_mul(rest, ((new, 1),)), w), c * p)
        for idx, a in enumerate(w):
            letters = list(w)
            letters[idx] = JetAtom(a.name, a.region, a.dt + dt, a.dx + dx)
            s = sort_word(letters)
            if s is None:
                continue
            sign, nw = s
            add((r, ex, j, nw), c if sign > 0 else -c)
    return Expr(out, _trusted=True)


def dt(e: Expr, n: int = 1) -> Expr:
    for _ in range(n):
        e = total_derivative(e, "t")
    return e


def dx(e: Expr, n: int = 1) -> Expr:
    for _ in range(n):
        e = total_derivative(e, "x")
    return e


def d_plus(e: Expr) -> Expr:
    """Light-cone derivative (D_x + D_t)/2."""
    return (total_derivative(e, "x") + total_derivative(e, "t")).scale(Fraction(1, 2))


def d_minus(e: Expr) -> Expr:
    """Light-cone derivative (D_x - D_t)/2."""
    return (total_derivative(e, "x") - total_derivative(e, "t")).scale(Fraction(1, 2))


def prolong(e: Expr, dt_n: int, dx_n: int) -> Expr:
    for _ in range(dt_n):
        e = total_derivative(e, "t")
    for _ in range(dx_n):
        e = total_derivative(e, "x")
    return e


# ---------------------------------------------------------------- field maps

def map_fields(e: Expr, field_map: Callable[[FieldAtom], tuple[FieldAtom, int] | None],
               jet_sign: Callable[[JetAtom], int] | None = None,
               rad_map: Callable[[tuple], tuple] | None = None) -> Expr:
    """Relabel fields: ``field_map(f) -> (f', sign)`` (sign applies per odd letter).

    Even fields may only be relabelled (sign must be +1 inside exponentials,
    a polynomial sign is allowed).  ``jet_sign`` gives an extra sign for each
    jet (used for parity/time reversal), and ``rad_map`` permutes radicals.
    """
    out: dict = {}
    for (r, ex, j, w), c in e.terms.items():
        sign = 1
        nex = []
        for f, coef in ex:
            res = field_map(f)
            if res is None:
                nex.append((f, coef))
                continue
            nf, s = res
            if s < 0:
                coef = -coef
            nex.append((nf, coef))
        ex2 = ()
        if nex:
            d: dict = {}
            for f, coef in nex:
                d[f] = d.get(f, ZERO) + coef
            ex2 = tuple(sorted((k, v) for k, v in d.items() if v))
        nj = []
        for a, p in j:
            res = field_map(a.base)
            s = 1
            na = a
            if res is not None:
                nf, s = res
                na = JetAtom(nf.name, nf.region, a.dt, a.dx)
            if jet_sign is not None:
                s *= jet_sign(a)
            if s < 0 and p & 1:
                sign = -sign
            nj.append((na, p))
        d2: dict = {}
        for a, p in nj:
            d2[a] = d2.get(a, 0) + p
        j2 = tuple(sorted(d2.items()))
        letters = []
        for a in w:
            res = field_map(a.base)
            s = 1
            na = a
            if res is not None:
                nf, s = res
                na = JetAtom(nf.name, nf.region, a.dt, a.dx)
            if jet_sign is not None:
                s *= jet_sign(a)
            if s < 0:
                sign = -sign
            letters.append(na)
        sw = sort_word(letters)
        if sw is None:
            continue
        wsign, w2 = sw
        sign *= wsign
        r2 = rad_map(r) if rad_map is not None else r
        key = (r2, ex2, j2, w2)
        v = out.get(key, ZERO) + (c if sign > 0 else -c)
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return Expr(out, _trusted=True)


def set_zero(e: Expr, pred: Callable[[JetAtom], bool]) -> Expr:
    """Drop every monomial containing a polynomial or odd atom matching ``pred``."""
    def keep(key):
        _, _, j, w = key
        return not any(pred(a) for a, _ in j) and not any(pred(a) for a in w)
    return e.filter(keep)


def drop_fermions(e: Expr) -> Expr:
    return e.filter(lambda k: not k[3])


def substitute_odd(e: Expr, atom: JetAtom, value: Expr) -> Expr:
    """Replace one odd atom by an odd expression (order-preserving)."""
    out = Expr()
    for (r, ex, j, w), c in e.terms.items():
        if atom not in w:
            out = out + Expr({(r, ex, j, w): c}, _trusted=True)
            continue
        p = w.index(atom)
        left = Expr({(r, ex, j, w[:p]): c}, _trusted=True)
        right = Expr({(ONE_RAD, (), (), w[p + 1:]): ONE}, _trusted=True)
        out = out + left * value * right
    return out


def substitute_even_jet(e: Expr, atom: JetAtom, value: Expr) -> Expr:
    """Replace a polynomial even jet by an expression."""
    out = Expr()
    powers: dict = {}
    for (r, ex, j, w), c in e.terms.items():
        p = 0
        for idx, (a, q) in enumerate(j):
            if a == atom:
                p = q
                j = j[:idx] + j[idx + 1:]
                break
        base = Expr({(r, ex, j, w): c}, _trusted=True)
        if p == 0:
            out = out + base
            continue
        if p not in powers:
            powers[p] = value ** p
        out = out + base * powers[p]
    return out


def substitute_boson_in_forms(e: Expr, f: FieldAtom, linear: Mapping[FieldAtom, Fraction]) -> Expr:
    """Linear change of even variables ``f -> sum c_i g_i`` inside exponentials only."""
    out: dict = {}
    for (r, ex, j, w), c in e.terms.items():
        d: dict = {}
        for g, coef in ex:
            if g == f:
                for h, lc in linear.items():
                    d[h] = d.get(h, ZERO) + coef * Fraction(lc)
            else:
                d[g] = d.get(g, ZERO) + coef
        key = (r, tuple(sorted((k, v) for k, v in d.items() if v)), j, w)
        v = out.get(key, ZERO) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return Expr(out, _trusted=True)
