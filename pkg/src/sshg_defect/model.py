"""Bulk N=2 super sinh-Gordon theory: Lagrangian, field equations, susy and PT."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .fields import HALF, I, M, chi, chib, cosh, phi, psi, psib, sinh, vphi
from .symexpr import (
    CHI, CHIBAR, F, LEFT, PHI, PSI, PSIBAR, VARPHI, Expr, FieldAtom, JetAtom, Rule,
    RewriteSystem, dt, dx, jet_derive, map_fields, parse, prolong,
)

FIELD_NAMES = ("phi", "varphi", "psi", "psibar", "chi", "chibar")
_INDEX = {n: i for i, n in enumerate(FIELD_NAMES)}


@dataclass(frozen=True)
class LagrangianDensity:
    expr: Expr
    label: str = ""


# ---------------------------------------------------------------- Lagrangian

def _yukawa(r: int) -> tuple[Expr, Expr]:
    """(psibar psi + chibar chi, psibar chi + chibar psi) in region r."""
    return (psib(r) * psi(r) + chib(r) * chi(r), psib(r) * chi(r) + chib(r) * psi(r))


def _cc(r):
    return cosh(phi(r)) * cosh(vphi(r))


def _ss(r):
    return sinh(phi(r)) * sinh(vphi(r))


def _sc(r):
    """sinh(phi) cosh(varphi)."""
    return sinh(phi(r)) * cosh(vphi(r))


def _cs(r):
    """cosh(phi) sinh(varphi)."""
    return cosh(phi(r)) * sinh(vphi(r))


def bosonic_potential(r: int) -> Expr:
    return M ** 2 * (cosh(phi(r) * 2) - cosh(vphi(r) * 2))


def yukawa_terms(r: int) -> Expr:
    a, b = _yukawa(r)
    return 4 * I * M * a * _cc(r) - 4 * I * M * b * _ss(r)


def bulk_lagrangian(r: int = 1) -> LagrangianDensity:
    """The ten-term bulk Lagrangian with fields carrying region tag ``r``."""
    kin = (HALF * phi(r, dx=1) ** 2 - HALF * phi(r, dt=1) ** 2
           - HALF * vphi(r, dx=1) ** 2 + HALF * vphi(r, dt=1) ** 2)
    ferm = (-I * psi(r) * (psi(r, dx=1) - psi(r, dt=1))
            + I * psib(r) * (psib(r, dx=1) + psib(r, dt=1))
            + I * chi(r) * (chi(r, dx=1) - chi(r, dt=1))
            - I * chib(r) * (chib(r, dx=1) + chib(r, dt=1)))
    return LagrangianDensity(kin + ferm + bosonic_potential(r) + yukawa_terms(r), f"L_bulk[{r}]")


BULK_TEXT = (
    "1/2*dx(phi[r])^2 - 1/2*dt(phi[r])^2 - 1/2*dx(varphi[r])^2 + 1/2*dt(varphi[r])^2"
    " - I*psi[r]*(dx(psi[r]) - dt(psi[r])) + I*psibar[r]*(dx(psibar[r]) + dt(psibar[r]))"
    " + I*chi[r]*(dx(chi[r]) - dt(chi[r])) - I*chibar[r]*(dx(chibar[r]) + dt(chibar[r]))"
    " + m^2*(cosh(2*phi[r]) - cosh(2*varphi[r]))"
    " + 4*I*m*(psibar[r]*psi[r] + chibar[r]*chi[r])*cosh(phi[r])*cosh(varphi[r])"
    " - 4*I*m*(psibar[r]*chi[r] + chibar[r]*psi[r])*sinh(phi[r])*sinh(varphi[r])"
)


def bulk_lagrangian_text(r: int = 1) -> LagrangianDensity:
    """Same Lagrangian built by parsing its text form."""
    return LagrangianDensity(parse(BULK_TEXT.replace("[r]", f"[{r}]")), f"L_bulk[{r}]")


def with_m_zero(e: Expr) -> Expr:
    """Drop every monomial carrying a positive power of m."""
    return e.filter(lambda k: k[0][2] <= 0)


# ---------------------------------------------------------------- Euler-Lagrange

def euler_lagrange(L: LagrangianDensity | Expr, fa: FieldAtom, side: str = LEFT) -> Expr:
    """dL/dq - D_t dL/d(q_t) - D_x dL/d(q_x) with graded derivatives on ``side``."""
    e = L.expr if isinstance(L, LagrangianDensity) else L
    q = JetAtom(fa.name, fa.region, 0, 0)
    out = jet_derive(e, q, side)
    out = out - dt(jet_derive(e, q.shifted(dt=1), side))
    out = out - dx(jet_derive(e, q.shifted(dx=1), side))
    return out


def bulk_eom_rhs(r: int) -> dict:
    """Right-hand sides of the printed field equations (keyed by field name)."""
    a, b = _yukawa(r)
    cc, ss, sc, cs = _cc(r), _ss(r), _sc(r), _cs(r)
    return {
        "phi": 2 * M ** 2 * sinh(phi(r) * 2) + 4 * I * M * a * sc - 4 * I * M * b * cs,
        "varphi": 2 * M ** 2 * sinh(vphi(r) * 2) - 4 * I * M * a * cs + 4 * I * M * b * sc,
        "psi": -2 * M * (psib(r) * cc - chib(r) * ss),
        "psibar": -2 * M * (psi(r) * cc - chi(r) * ss),
        "chi": 2 * M * (chib(r) * cc - psib(r) * ss),
        "chibar": 2 * M * (chi(r) * cc - psi(r) * ss),
    }


def bulk_eom_lhs(r: int) -> dict:
    return {
        "phi": phi(r, dx=2) - phi(r, dt=2),
        "varphi": vphi(r, dx=2) - vphi(r, dt=2),
        "psi": psi(r, dx=1) - psi(r, dt=1),
        "psibar": psib(r, dx=1) + psib(r, dt=1),
        "chi": chi(r, dx=1) - chi(r, dt=1),
        "chibar": chib(r, dx=1) + chib(r, dt=1),
    }


def bulk_eom_reference(r: int) -> dict:
    """Printed field equations as residuals lhs - rhs."""
    lhs, rhs = bulk_eom_lhs(r), bulk_eom_rhs(r)
    return {k: lhs[k] - rhs[k] for k in FIELD_NAMES}


def proportionality(a: Expr, b: Expr) -> Expr | None:
    """Constant c (a coefficient monomial) with a == c*b, or None."""
    if not b.terms:
        return Expr() if not a.terms else None
    key_b, cb = b.sorted_terms()[0]
    rb, eb, jb, wb = key_b
    for (ra, ea, ja, wa), ca in a.terms.items():
        if (ea, ja, wa) == (eb, jb, wb):
            c = Expr({(ra, (), (), ()): ca}, _trusted=True) * Expr({(rb, (), (), ()): cb}, _trusted=True).inverse()
            return c if (a - c * b).is_zero() else None
    return None


def bulk_eom_rewrite(regions=(1, 2), chart: str = "tx", fields=FIELD_NAMES) -> RewriteSystem:
    """On-shell rules eliminating x-derivatives (``tx``) or chiral light-cone jets (``lc``).

    In the light-cone chart the ``dt`` slot of a jet counts d_- and the ``dx``
    slot counts d_+.
    """
    rules = []
    for r in regions:
        rhs = bulk_eom_rhs(r)
        if chart == "tx":
            table = {
                "phi": (JetAtom(PHI, r, 0, 2), phi(r, dt=2) + rhs["phi"]),
                "varphi": (JetAtom(VARPHI, r, 0, 2), vphi(r, dt=2) + rhs["varphi"]),
                "psi": (JetAtom(PSI, r, 0, 1), psi(r, dt=1) + rhs["psi"]),
                "psibar": (JetAtom(PSIBAR, r, 0, 1), -psib(r, dt=1) + rhs["psibar"]),
                "chi": (JetAtom(CHI, r, 0, 1), chi(r, dt=1) + rhs["chi"]),
                "chibar": (JetAtom(CHIBAR, r, 0, 1), -chib(r, dt=1) + rhs["chibar"]),
            }
        else:
            q = Fraction(1, 4)
            table = {
                "phi": (JetAtom(PHI, r, 1, 1), rhs["phi"] * q),
                "varphi": (JetAtom(VARPHI, r, 1, 1), rhs["varphi"] * q),
                "psi": (JetAtom(PSI, r, 1, 0), rhs["psi"] * HALF),
                "psibar": (JetAtom(PSIBAR, r, 0, 1), rhs["psibar"] * HALF),
                "chi": (JetAtom(CHI, r, 1, 0), rhs["chi"] * HALF),
                "chibar": (JetAtom(CHIBAR, r, 0, 1), rhs["chibar"] * HALF),
            }
        for name in fields:
            lhs, value = table[name]
            rules.append(Rule(lhs, value, ("t", "x")))
    return RewriteSystem(rules, name=f"bulk-eom-{chart}")


# ---------------------------------------------------------------- susy

@dataclass
class SusyProjection:
    """Parameter-stripped variations: delta X = eps * rules[X] with eps on the left."""

    which: str
    rules: dict = field(default_factory=dict)


def delta1(regions=(1,)) -> SusyProjection:
    rules = {}
    for r in regions:
        rules[FieldAtom(PHI, r)] = I * psi(r)
        rules[FieldAtom(VARPHI, r)] = -I * chi(r)
        rules[FieldAtom(PSI, r)] = HALF * (phi(r, dx=1) + phi(r, dt=1))
        rules[FieldAtom(CHI, r)] = -HALF * (vphi(r, dx=1) + vphi(r, dt=1))
        rules[FieldAtom(PSIBAR, r)] = -M * _sc(r)
        rules[FieldAtom(CHIBAR, r)] = -M * _cs(r)
    return SusyProjection("eps1", rules)


def susy_vary(e: Expr, proj: SusyProjection) -> Expr:
    """Odd derivation D with delta = eps*D, prolonged to jets (D commutes with D_t, D_x)."""
    rules = proj.rules
    cache: dict = {}

    def var(a: JetAtom) -> Expr | None:
        if a not in cache:
            base = rules.get(FieldAtom(a.name, a.region))
            cache[a] = None if base is None else prolong(base, a.dt, a.dx)
        return cache[a]

    out = Expr()
    for (r, ex, j, w), c in e.terms.items():
        rest = Expr({(r, ex, j, ()): c}, _trusted=True)
        word = Expr({((0, 0, 0, 0, 0), (), (), w): Fraction(1)}, _trusted=True)
        for fa, coef in ex:
            v = var(JetAtom(fa.name, fa.region, 0, 0))
            if v is not None:
                out = out + v * rest * word * coef
        for idx, (a, p) in enumerate(j):
            v = var(a)
            if v is None:
                continue
            nj = j[:idx] + (((a, p - 1),) if p > 1 else ()) + j[idx + 1:]
            out = out + v * Expr({(r, ex, nj, ()): c * p}, _trusted=True) * word
        for idx, a in enumerate(w):
            v = var(a)
            if v is None:
                continue
            pre = Expr({((0, 0, 0, 0, 0), (), (), w[:idx]): Fraction(1)}, _trusted=True)
            post = Expr({((0, 0, 0, 0, 0), (), (), w[idx + 1:]): Fraction(1)}, _trusted=True)
            t = rest * pre * v * post
            out = out + (-t if idx & 1 else t)
    return out


def variation_brackets(r: int = 1, flip: str | None = None, chi_t_sign: int = -1) -> dict:
    """The x-, t- and conservation-law brackets of the total-derivative identity.

    Returns parameter-stripped ``dx_bracket``, ``dt_bracket``, and the pair
    ``(law_t, law_x)`` with the law reading D_t(law_t) - D_x(law_x).
    ``chi_t_sign`` is the sign of the 2 d+ varphi piece in the chi term of the
    t-bracket; only -1 closes the identity.  ``flip`` negates one bracket
    (negative control).
    """
    dplus = lambda e: HALF * (dx(e) + dt(e))
    dminus = lambda e: HALF * (dx(e) - dt(e))
    p, v = phi(r), vphi(r)
    tail = M * psib(r) * _sc(r) - M * chib(r) * _cs(r)
    bx = I * (psi(r) * (dminus(p) + 2 * dplus(p)) + chi(r) * (dminus(v) + 2 * dplus(v)) + tail)
    bt = I * (psi(r) * (dminus(p) - 2 * dplus(p)) + chi(r) * (dminus(v) + chi_t_sign * 2 * dplus(v)) + tail)
    core = 2 * I * psi(r) * dplus(p) + 2 * I * chi(r) * dplus(v)
    mt = 2 * I * M * (psib(r) * _sc(r) - chib(r) * _cs(r))
    law_t, law_x = core - mt, core + mt
    out = {"dx_bracket": bx, "dt_bracket": bt, "law_t": law_t, "law_x": law_x}
    if flip:
        out[flip] = -out[flip]
    return out


def susy_identity_residual(r: int = 1, brackets: dict | None = None, m_zero: bool = False) -> Expr:
    """delta_1 L - D_x[..] - D_t[..] - (D_t law_t - D_x law_x), off-shell."""
    b = brackets or variation_brackets(r)
    L = bulk_lagrangian(r).expr
    res = (susy_vary(L, delta1((r,))) - dx(b["dx_bracket"]) - dt(b["dt_bracket"])
           - (dt(b["law_t"]) - dx(b["law_x"])))
    return with_m_zero(res) if m_zero else res


# ---------------------------------------------------------------- PT

_SWAP_REGION = {0: 0, 1: 2, 2: 1}


def _pt_field(context: str) -> Callable:
    def fmap(fa: FieldAtom):
        n, r = fa.name, fa.region
        if context == "bulk":
            r2 = r
        else:
            r2 = _SWAP_REGION[r]
        if n in (PHI, VARPHI):
            return FieldAtom(n, r2), 1
        if n in (PSI, CHI, PSIBAR, CHIBAR):
            partner = {PSI: CHI, CHI: PSI, PSIBAR: CHIBAR, CHIBAR: PSIBAR}[n]
            return FieldAtom(partner, r2), -1
        if context == "type1":
            return fa, (1 if n == F else -1)
        # fused defect: f1 <-> f2, g1 <-> -g2
        return FieldAtom(n, _SWAP_REGION[r]), (1 if n == F else -1)
    return fmap


def _swap_sigma(r: tuple) -> tuple:
    return (r[0], r[1], r[2], r[4], r[3])


def pt_transform(e: Expr, context: str = "bulk") -> Expr:
    """(x, t) -> (-x, -t) with the field maps of ``context`` (bulk, type1, defect).

    For the fused defect the two defect parameters are exchanged together with
    the regions.
    """
    if context not in ("bulk", "type1", "defect"):
        raise ValueError(f"unknown PT context {context!r}")
    rad = _swap_sigma if context == "defect" else None
    return map_fields(e, _pt_field(context), jet_sign=lambda a: -1 if (a.dt + a.dx) & 1 else 1,
                      rad_map=rad)


def parity_bar(e: Expr) -> Expr:
    """x -> -x with psi -> psibar, psibar -> -psi, chi -> chibar, chibar -> -chi."""
    table = {PSI: (PSIBAR, 1), PSIBAR: (PSI, -1), CHI: (CHIBAR, 1), CHIBAR: (CHI, -1)}

    def fmap(fa: FieldAtom):
        if fa.name in table:
            n, s = table[fa.name]
            return FieldAtom(n, fa.region), s
        return None
    return map_fields(e, fmap, jet_sign=lambda a: -1 if a.dx & 1 else 1)


# ---------------------------------------------------------------- charges

@dataclass(frozen=True)
class ChargeDensity:
    kind: str
    bulk_expr: Expr
    flux: Expr
    region: int


CHARGE_KINDS = ("E", "P", "Q1", "Q1bar", "Q2", "Q2bar")


def _dyn_jets(r: int):
    for n in range(6):
        yield JetAtom(n, r, 0, 0)


def noether_energy(L: Expr, r: int) -> tuple[Expr, Expr]:
    """(E, flux) with E = L - sum q_t dL/dq_t and D_t E = D_x flux on shell."""
    e, fl = L, Expr()
    for q in _dyn_jets(r):
        qt = Expr.jet(q.shifted(dt=1))
        e = e - qt * jet_derive(L, q.shifted(dt=1))
        fl = fl + qt * jet_derive(L, q.shifted(dx=1))
    return e, fl


def noether_momentum(L: Expr, r: int) -> tuple[Expr, Expr]:
    """(P, flux) with the sign of the printed momentum density."""
    p, fl = Expr(), -L
    for q in _dyn_jets(r):
        qx = Expr.jet(q.shifted(dx=1))
        p = p - qx * jet_derive(L, q.shifted(dt=1))
        fl = fl + qx * jet_derive(L, q.shifted(dx=1))
    return p, fl


def kinetic_energy(r: int) -> Expr:
    return (HALF * phi(r, dx=1) ** 2 + HALF * phi(r, dt=1) ** 2
            - HALF * vphi(r, dx=1) ** 2 - HALF * vphi(r, dt=1) ** 2
            - I * (psi(r) * psi(r, dx=1) - psib(r) * psib(r, dx=1))
            + I * (chi(r) * chi(r, dx=1) - chib(r) * chib(r, dx=1)))


def derived_potentials(r: int) -> tuple[Expr, Expr]:
    """(V_r, W_r): the potential parts of the Noether energy beyond its kinetic part.

    V is the fermion-free part, W the fermion-bilinear part.
    """
    e, _ = noether_energy(bulk_lagrangian(r).expr, r)
    pot = e - kinetic_energy(r)
    return pot.fermion_degree_part(0), pot.fermion_degree_part(2)


def momentum_density(r: int) -> Expr:
    return (phi(r, dt=1) * phi(r, dx=1) - vphi(r, dt=1) * vphi(r, dx=1)
            - I * (psi(r) * psi(r, dx=1) + psib(r) * psib(r, dx=1))
            + I * (chi(r) * chi(r, dx=1) + chib(r) * chib(r, dx=1)))


def q1_density(r: int) -> Expr:
    return (I * psi(r) * (phi(r, dx=1) + phi(r, dt=1)) + I * chi(r) * (vphi(r, dx=1) + vphi(r, dt=1))
            - 2 * I * M * psib(r) * _sc(r) + 2 * I * M * chib(r) * _cs(r))


def q1bar_density(r: int) -> Expr:
    return (I * psib(r) * (phi(r, dx=1) - phi(r, dt=1)) + I * chib(r) * (vphi(r, dx=1) - vphi(r, dt=1))
            - 2 * I * M * psi(r) * _sc(r) + 2 * I * M * chi(r) * _cs(r))


def q2_density(r: int) -> Expr:
    return (I * chi(r) * (phi(r, dx=1) + phi(r, dt=1)) + I * psi(r) * (vphi(r, dx=1) + vphi(r, dt=1))
            + 2 * I * M * chib(r) * _sc(r) - 2 * I * M * psib(r) * _cs(r))


def q2bar_density(r: int) -> Expr:
    return (I * psib(r) * (vphi(r, dx=1) - vphi(r, dt=1)) + I * chib(r) * (phi(r, dx=1) - phi(r, dt=1))
            + 2 * I * M * chi(r) * _sc(r) - 2 * I * M * psi(r) * _cs(r))


def bulk_charge_density(kind: str, r: int = 1) -> ChargeDensity:
    """Printed density of ``kind`` with its flux (D_t density = D_x flux on shell)."""
    L = bulk_lagrangian(r).expr
    if kind == "E":
        v, w = derived_potentials(r)
        _, fl = noether_energy(L, r)
        return ChargeDensity(kind, kinetic_energy(r) + v + w, fl, r)
    if kind == "P":
        _, fl = noether_momentum(L, r)
        return ChargeDensity(kind, momentum_density(r), fl, r)
    law = variation_brackets(r)
    if kind == "Q1":
        return ChargeDensity(kind, q1_density(r), law["law_x"], r)
    if kind == "Q2":
        # PT flips both derivatives, so the law keeps its form
        return ChargeDensity(kind, q2_density(r), pt_transform(law["law_x"]), r)
    # the barred densities are minus the parity-bar images, and x -> -x flips
    # the flux sign once more
    if kind == "Q1bar":
        return ChargeDensity(kind, q1bar_density(r), parity_bar(law["law_x"]), r)
    if kind == "Q2bar":
        return ChargeDensity(kind, q2bar_density(r), parity_bar(pt_transform(law["law_x"])), r)
    raise ValueError(f"unknown charge kind {kind!r}")
