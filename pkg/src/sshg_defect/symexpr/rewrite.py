"""Ordered substitution rules on jet atoms, reduced to a fixpoint."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .calculus import prolong
from .core import ONE, ONE_RAD, Expr, JetAtom


class NonTerminating(RuntimeError):
    """Raised when reduction does not reach a fixpoint within ``max_passes``."""


class CyclicRules(ValueError):
    """Raised at construction when a rule's right-hand side depends on itself."""


@dataclass(frozen=True)
class Rule:
    lhs: JetAtom
    rhs: Expr
    # directions in which the rule may be prolonged: jets (dt+a, dx+b) of lhs
    # are rewritten to D_t^a D_x^b rhs
    prolong: tuple = ()

    def matches(self, atom: JetAtom) -> tuple[int, int] | None:
        l = self.lhs
        if atom.name != l.name or atom.region != l.region:
            return None
        a, b = atom.dt - l.dt, atom.dx - l.dx
        if a < 0 or b < 0:
            return None
        if a and "t" not in self.prolong:
            return None
        if b and "x" not in self.prolong:
            return None
        return a, b


@dataclass
class RewriteSystem:
    """Rules are tried in order; the first match wins.

    Reduced right-hand sides are memoized per atom, so one sweep of an
    expression reaches the fixpoint.  ``max_passes`` bounds the nesting depth
    of rule applications.
    """

    rules: list = field(default_factory=list)
    max_passes: int = 64
    name: str = ""

    def __post_init__(self):
        self._check_acyclic()
        self._cache: dict = {}

    @classmethod
    def from_pairs(cls, pairs: Iterable, prolong: tuple = (), **kw) -> "RewriteSystem":
        return cls([Rule(l, r, prolong) for l, r in pairs], **kw)

    def extended(self, other: "RewriteSystem", name: str = "") -> "RewriteSystem":
        return RewriteSystem(list(self.rules) + list(other.rules),
                             max(self.max_passes, other.max_passes), name or self.name)

    def lhs_atoms(self) -> list:
        return [r.lhs for r in self.rules]

    def _check_acyclic(self) -> None:
        graph: dict = {}
        for i, rule in enumerate(self.rules):
            deps = set()
            for atom in _poly_and_odd_atoms(rule.rhs):
                for k, other in enumerate(self.rules):
                    if other.matches(atom) is not None:
                        deps.add(k)
                        break
            graph[i] = deps
        state: dict = {}

        def visit(n, path):
            if state.get(n) == 1:
                cyc = " -> ".join(str(self.rules[k].lhs) for k in path + [n])
                raise CyclicRules(f"cyclic rewrite rules: {cyc}")
            if state.get(n) == 2:
                return
            state[n] = 1
            for d in graph[n]:
                visit(d, path + [n])
            state[n] = 2

        for n in graph:
            visit(n, [])

    def rule_for(self, atom: JetAtom):
        for rule in self.rules:
            m = rule.matches(atom)
            if m is not None:
                return rule, m
        return None

    def reduced_value(self, atom: JetAtom, depth: int = 0) -> Expr | None:
        """Fully reduced replacement for ``atom``, or None if no rule applies."""
        if atom in self._cache:
            return self._cache[atom]
        found = self.rule_for(atom)
        if found is None:
            self._cache[atom] = None
            return None
        if depth > self.max_passes:
            raise NonTerminating(f"rewriting {atom} exceeded {self.max_passes} nested passes")
        rule, (a, b) = found
        value = prolong(rule.rhs, a, b) if (a or b) else rule.rhs
        value = self._reduce(value, depth + 1)
        self._cache[atom] = value
        return value

    def _reduce(self, e: Expr, depth: int) -> Expr:
        if depth > self.max_passes:
            raise NonTerminating(f"reduction exceeded {self.max_passes} nested passes")
        out = Expr()
        pending: dict = {}
        for key, c in e.terms.items():
            r, ex, j, w = key
            hits_j = [(a, p) for a, p in j if self.reduced_value(a, depth) is not None]
            hits_w = [a for a in w if self.reduced_value(a, depth) is not None]
            if not hits_j and not hits_w:
                pending[key] = c
                continue
            # rebuild the monomial as an ordered product with replacements
            keep_j = tuple((a, p) for a, p in j if (a, p) not in hits_j)
            term = Expr({(r, ex, keep_j, ()): c}, _trusted=True)
            for a, p in hits_j:
                term = term * (self._cache[a] ** p)
            for a in w:
                v = self._cache.get(a)
                if v is None:
                    v = Expr({(ONE_RAD, (), (), (a,)): ONE}, _trusted=True)
                term = term * v
            out = out + term
        if pending:
            out = out + Expr(pending, _trusted=True)
        return out

    def apply(self, e: Expr) -> Expr:
        return self._reduce(e, 0)

    __call__ = apply


def substitute(e: Expr, rs: RewriteSystem) -> Expr:
    """Apply ``rs`` to a fixpoint; the result contains no rule left-hand side."""
    return rs.apply(e)


def _poly_and_odd_atoms(e: Expr) -> set:
    out = set()
    for _, _, j, w in e.terms:
        out.update(a for a, _ in j)
        out.update(w)
    return out


def contains_any(e: Expr, rs: RewriteSystem) -> list:
    """Atoms of ``e`` that some rule of ``rs`` would still rewrite."""
    return sorted(a for a in _poly_and_odd_atoms(e) if rs.rule_for(a) is not None)
