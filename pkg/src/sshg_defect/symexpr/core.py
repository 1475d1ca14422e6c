"""Canonical Grassmann-graded exponential-polynomial expressions.

A monomial is stored under a key ``(rad, exp, jets, word)``:

rad
    exponents of the radical symbols ``(I, 2, m, s1, s2)``.  ``I`` and ``2``
    are reduced to ``{0, 1}`` (``I**2 = -1``, ``sqrt(2)**2 = 2``); ``m``, ``s1``
    and ``s2`` carry any half-integer exponent, counted in halves.
exp
    the linear form of an exponential atom, a sorted tuple of
    ``(FieldAtom, Fraction)``.
jets
    commuting polynomial factors, a sorted tuple of ``(JetAtom, power)``.
word
    the ordered product of odd jets, strictly increasing in the global order.

The value attached to a key is a nonzero :class:`~fractions.Fraction`.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

NAMES = ("phi", "varphi", "psi", "psibar", "chi", "chibar", "f", "g")
NAME_INDEX = {n: i for i, n in enumerate(NAMES)}
PHI, VARPHI, PSI, PSIBAR, CHI, CHIBAR, F, G = range(8)
EVEN_NAMES = (PHI, VARPHI)
RAD_SYMBOLS = ("I", "2", "m", "s1", "s2")
ONE_RAD = (0, 0, 0, 0, 0)

ZERO = Fraction(0)
ONE = Fraction(1)


class FieldAtom(NamedTuple):
    name: int
    region: int

    @property
    def odd(self) -> bool:
        return self.name >= PSI

    @property
    def parity(self) -> int:
        return 1 if self.name >= PSI else 0

    def jet(self, dt: int = 0, dx: int = 0) -> "JetAtom":
        return JetAtom(self.name, self.region, dt, dx)

    def __str__(self) -> str:
        return f"{NAMES[self.name]}[{self.region}]"


class JetAtom(NamedTuple):
    name: int
    region: int
    dt: int
    dx: int

    @property
    def odd(self) -> bool:
        return self.name >= PSI

    @property
    def parity(self) -> int:
        return 1 if self.name >= PSI else 0

    @property
    def base(self) -> FieldAtom:
        return FieldAtom(self.name, self.region)

    @property
    def order(self) -> int:
        return self.dt + self.dx

    def shifted(self, dt: int = 0, dx: int = 0) -> "JetAtom":
        return JetAtom(self.name, self.region, self.dt + dt, self.dx + dx)

    def __str__(self) -> str:
        s = f"{NAMES[self.name]}[{self.region}]"
        for _ in range(self.dx):
            s = f"dx({s})"
        for _ in range(self.dt):
            s = f"dt({s})"
        return s


def field_atom(name: str | int, region: int) -> FieldAtom:
    idx = NAME_INDEX[name] if isinstance(name, str) else name
    if idx in (F, G) and region not in (1, 2):
        raise ValueError(f"auxiliary fermion {NAMES[idx]} needs region 1 or 2, got {region}")
    if region not in (0, 1, 2):
        raise ValueError(f"region must be 0, 1 or 2, got {region}")
    return FieldAtom(idx, region)


def parity_of(name: str | int) -> int:
    idx = NAME_INDEX[name] if isinstance(name, str) else name
    return 1 if idx >= PSI else 0


# ---------------------------------------------------------------- kernels

@lru_cache(maxsize=None)
def rad_mul(a: tuple, b: tuple) -> tuple[tuple, Fraction]:
    i = a[0] + b[0]
    two = a[1] + b[1]
    factor = ONE
    if i >= 2:
        i -= 2
        factor = -factor
    if two >= 2:
        two -= 2
        factor = factor * 2
    return (i, two, a[2] + b[2], a[3] + b[3], a[4] + b[4]), factor


@lru_cache(maxsize=None)
def form_add(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, v in b:
        w = d.get(k, ZERO) + v
        if w:
            d[k] = w
        else:
            del d[k]
    return tuple(sorted(d.items()))


@lru_cache(maxsize=None)
def jets_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, v in b:
        d[k] = d.get(k, 0) + v
    return tuple(sorted(d.items()))


@lru_cache(maxsize=None)
def word_mul(a: tuple, b: tuple):
    """Return ``(sign, word)`` for the product of two sorted words, or None if zero."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    inversions = 0
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x == y:
            return None
        if x < y:
            out.append(x)
            i += 1
        else:
            out.append(y)
            j += 1
            inversions += na - i
    out.extend(a[i:])
    out.extend(b[j:])
    return (-1 if inversions & 1 else 1), tuple(out)


def sort_word(letters: list) -> tuple[int, tuple] | None:
    """Sort a list of odd atoms, returning the permutation sign, or None on a repeat."""
    letters = list(letters)
    n = len(letters)
    sign = 1
    for i in range(1, n):
        j = i
        while j > 0 and letters[j - 1] > letters[j]:
            letters[j - 1], letters[j] = letters[j], letters[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, n):
        if letters[i] == letters[i - 1]:
            return None
    return sign, tuple(letters)


# ---------------------------------------------------------------- Expr

def _coerce(x) -> "Expr":
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Expr.const(x)
    if isinstance(x, complex):
        raise TypeError("floating complex numbers are not exact; use Expr.I")
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


class Expr:
    """Immutable canonical expression (a finite sum of monomials)."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping | None = None, _trusted: bool = False):
        if terms is None:
            terms = {}
        elif not _trusted:
            terms = {k: Fraction(v) for k, v in terms.items() if v}
        self.terms: dict = terms
        self._hash = None

    # construction ---------------------------------------------------------
    @classmethod
    def const(cls, c) -> "Expr":
        c = Fraction(c)
        if not c:
            return cls()
        return cls({(ONE_RAD, (), (), ()): c}, _trusted=True)

    @classmethod
    def radical(cls, i: int = 0, two: int = 0, m: int = 0, s1: int = 0, s2: int = 0,
                coeff=1) -> "Expr":
        """Monomial ``coeff * I**i * 2**(two/2) * m**(m/2) * s1**(s1/2) * s2**(s2/2)``."""
        c = Fraction(coeff)
        i %= 4
        if i >= 2:
            c = -c
            i -= 2
        c = c * 2 ** (two // 2) if two >= 0 else c / 2 ** ((-two + 1) // 2)
        two = two % 2
        return cls({((i, two, m, s1, s2), (), (), ()): c}, _trusted=True) if c else cls()

    @classmethod
    def jet(cls, atom: JetAtom) -> "Expr":
        if atom.odd:
            key = (ONE_RAD, (), (), (atom,))
        else:
            key = (ONE_RAD, (), ((atom, 1),), ())
        return cls({key: ONE}, _trusted=True)

    @classmethod
    def field(cls, name: str | int, region: int, dt: int = 0, dx: int = 0) -> "Expr":
        f = field_atom(name, region)
        return cls.jet(JetAtom(f.name, f.region, dt, dx))

    @classmethod
    def exp_form(cls, form: Mapping[FieldAtom, Fraction] | Iterable) -> "Expr":
        items = form.items() if isinstance(form, Mapping) else form
        d: dict = {}
        for k, v in items:
            if k.name not in EVEN_NAMES:
                raise ValueError("only even fields may appear in an exponential")
            d[FieldAtom(k.name, k.region)] = d.get(FieldAtom(k.name, k.region), ZERO) + Fraction(v)
        key = (ONE_RAD, tuple(sorted((k, v) for k, v in d.items() if v)), (), ())
        return cls({key: ONE}, _trusted=True)

    @classmethod
    def exp(cls, arg: "Expr") -> "Expr":
        """Exponential of a linear combination of undifferentiated even fields."""
        form = linear_form(arg)
        return cls.exp_form(form)

    @classmethod
    def cosh(cls, arg: "Expr") -> "Expr":
        return (cls.exp(arg) + cls.exp(-arg)) * Fraction(1, 2)

    @classmethod
    def sinh(cls, arg: "Expr") -> "Expr":
        return (cls.exp(arg) - cls.exp(-arg)) * Fraction(1, 2)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other) -> "Expr":
        other = _coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            w = out.get(k, ZERO) + v
            if w:
                out[k] = w
            else:
                del out[k]
        return Expr(out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr({k: -v for k, v in self.terms.items()}, _trusted=True)

    def __sub__(self, other) -> "Expr":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Expr":
        return _coerce(other) - self

    def scale(self, c) -> "Expr":
        c = Fraction(c)
        if not c:
            return Expr()
        return Expr({k: v * c for k, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = _coerce(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return Expr()
        out: dict = {}
        get = out.get
        for (r1, e1, j1, w1), c1 in a.items():
            for (r2, e2, j2, w2), c2 in b.items():
                wm = word_mul(w1, w2)
                if wm is None:
                    continue
                sign, w = wm
                r, fac = rad_mul(r1, r2)
                key = (r, form_add(e1, e2), jets_mul(j1, j2), w)
                c = c1 * c2 * fac
                if sign < 0:
                    c = -c
                v = get(key, ZERO) + c
                if v:
                    out[key] = v
                else:
                    del out[key]
        return Expr(out, _trusted=True)

    def __rmul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return _coerce(other) * self

    def __truediv__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            return self.scale(ONE / Fraction(other))
        return self * _coerce(other).inverse()

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int) or n < 0:
            if self.is_coefficient_monomial():
                return self.coefficient_power(Fraction(n))
            raise ValueError("only nonnegative integer powers of general expressions")
        out = Expr.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # coefficient-only monomials --------------------------------------------
    def is_coefficient_monomial(self) -> bool:
        if len(self.terms) != 1:
            return False
        (r, e, j, w), = self.terms
        return not e and not j and not w

    def coefficient_power(self, p: Fraction) -> "Expr":
        """Raise ``c * rad`` to a rational power; half-integer powers need exact roots."""
        if not self.is_coefficient_monomial():
            raise ValueError("fractional power of a non-constant expression")
        ((r, _, _, _), c), = self.terms.items()
        p = Fraction(p)
        if p.denominator not in (1, 2):
            raise ValueError("only half-integer powers are supported")
        i, two, m, s1, s2 = r
        if p.denominator == 1:
            k = p.numerator
            base = self if k >= 0 else self.inverse()
            return base ** abs(k)
        # square root part, then integer part
        if i:
            raise ValueError("square root of an imaginary coefficient")
        if two % 2:
            raise ValueError("fourth root of 2")
        if c < 0:
            raise ValueError("square root of a negative coefficient")
        num_root = _rational_sqrt_with_two(c)
        if num_root is None:
            raise ValueError(f"radicand {c} is not a square times a power of 2")
        q, two_extra = num_root  # sqrt(c) = q * 2**(two_extra/2)
        # exponents of m, s1, s2 are in halves: sqrt halves them
        for e in (m, s1, s2):
            if e % 2:
                raise ValueError("nested radical of m, s1 or s2")
        root = Expr.radical(two=two_extra, m=m // 2, s1=s1 // 2, s2=s2 // 2, coeff=q)
        k = (p - Fraction(1, 2)).numerator
        out = root * (self ** k if k >= 0 else self.inverse() ** (-k))
        return out

    def inverse(self) -> "Expr":
        if not self.is_coefficient_monomial():
            raise ZeroDivisionError("only coefficient monomials are invertible")
        ((r, _, _, _), c), = self.terms.items()
        i, two, m, s1, s2 = r
        # 1/I = -I, 1/sqrt(2) = sqrt(2)/2
        cc = ONE / c
        if i:
            cc = -cc
        if two:
            cc = cc / 2
        return Expr({((i, two, -m, -s1, -s2), (), (), ()): cc}, _trusted=True)

    # comparison / hashing ----------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        from .printer import to_text
        return f"Expr({to_text(self)!r})"

    def __str__(self) -> str:
        from .printer import to_text
        return to_text(self)

    # structure -------------------------------------------------------------
    def parity(self) -> int | None:
        """0 or 1 for homogeneous expressions, None for mixed; the zero expression is even."""
        ps = {len(k[3]) & 1 for k in self.terms}
        if not ps:
            return 0
        if len(ps) == 1:
            return ps.pop()
        return None

    def atoms(self) -> set:
        """All jet atoms (polynomial and odd), plus exponent fields as order-0 jets."""
        out = set()
        for _, e, j, w in self.terms:
            out.update(a for a, _ in j)
            out.update(w)
            out.update(JetAtom(f.name, f.region, 0, 0) for f, _ in e)
        return out

    def map_coefficients(self, fn) -> "Expr":
        out = Expr()
        for key, c in self.terms.items():
            out = out + fn(key, c)
        return out

    def filter(self, pred) -> "Expr":
        return Expr({k: v for k, v in self.terms.items() if pred(k)}, _trusted=True)

    def fermion_degree_part(self, n: int) -> "Expr":
        return self.filter(lambda k: len(k[3]) == n)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0]))


def _sort_key(key):
    r, e, j, w = key
    return (len(w), w, j, e, r)


def monomial(key, c) -> Expr:
    return Expr({key: Fraction(c)} if c else {}, _trusted=True)


def linear_form(arg: Expr) -> dict:
    """Read ``arg`` as a rational linear combination of undifferentiated even fields."""
    form: dict = {}
    for (r, e, j, w), c in arg.terms.items():
        if r != ONE_RAD or e or w or len(j) != 1 or j[0][1] != 1:
            raise ValueError("exponent must be a rational linear form in undifferentiated even fields")
        atom = j[0][0]
        if atom.dt or atom.dx:
            raise ValueError("derivative jets cannot appear inside an exponential")
        f = FieldAtom(atom.name, atom.region)
        form[f] = form.get(f, ZERO) + c
    return {k: v for k, v in form.items() if v}


def _rational_sqrt_with_two(c: Fraction):
    """Write sqrt(c) as q * 2**(t/2) with rational q and t in {0, 1}, or None."""
    from math import isqrt
    num, den = c.numerator, c.denominator
    t = 0
    # pull odd power of two into the radical
    e2 = 0
    while num % 2 == 0:
        num //= 2
        e2 += 1
    while den % 2 == 0:
        den //= 2
        e2 -= 1
    a, b = isqrt(num), isqrt(den)
    if a * a != num or b * b != den:
        return None
    if e2 % 2:
        t = 1
        e2 -= 1
    q = Fraction(a, b) * (Fraction(2) ** (e2 // 2))
    return q, t


# ---------------------------------------------------------------- helpers

I = Expr.radical(i=1)
SQRT2 = Expr.radical(two=1)
M = Expr.radical(m=2)
S1 = Expr.radical(s1=2)
S2 = Expr.radical(s2=2)


def const(c) -> Expr:
    return Expr.const(c)


def fld(name: str, region: int, dt: int = 0, dx: int = 0) -> Expr:
    return Expr.field(name, region, dt, dx)


def exp(arg: Expr) -> Expr:
    return Expr.exp(arg)


def cosh(arg: Expr) -> Expr:
    return Expr.cosh(arg)


def sinh(arg: Expr) -> Expr:
    return Expr.sinh(arg)


def sqrt(x) -> Expr:
    return _coerce(x).coefficient_power(Fraction(1, 2))


def total(exprs: Iterable[Expr]) -> Expr:
    out = Expr()
    for e in exprs:
        out = out + e
    return out
