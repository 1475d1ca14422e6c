"""Type-I and type-II defects: potentials, defect conditions, fusing and Backlund relations."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .fields import (
    HALF, I, M, SQRT2, SQRT_M, chi, chib, cosh, exp, f, g, minus, phi, plus, psi, psib,
    sigma, sinh, sqrt_sigma, vphi,
)
from .model import bulk_lagrangian, proportionality
from .symexpr import (
    CHI, CHIBAR, F, G, LEFT, PHI, PSI, PSIBAR, VARPHI, Expr, FieldAtom, JetAtom, Rule,
    RewriteSystem, basis_derive, boson_derive, dt, dx, grassmann_derive, jet_derive,
    minus_combo, plus_combo, set_zero, substitute_odd,
)


class ConventionMismatch(RuntimeError):
    """Neither derivative convention reproduces the listed defect conditions."""


class InconsistentSystem(RuntimeError):
    """A linear elimination step met a non-unit or field-dependent coefficient."""


class ListedFormMismatch(AssertionError):
    """A derived expression differs from its listed form; ``diff`` holds derived - listed."""

    def __init__(self, what: str, diff: Expr):
        super().__init__(f"{what}: {len(diff)} residual terms")
        self.diff = diff


FERMIONS = (PSI, PSIBAR, CHI, CHIBAR)
BOSONS = (PHI, VARPHI)
_MAKE = {PHI: phi, VARPHI: vphi, PSI: psi, PSIBAR: psib, CHI: chi, CHIBAR: chib}


def d_odd(e: Expr, make, r: int, side: str = LEFT) -> Expr:
    return grassmann_derive(e, JetAtom(_name(make), r, 0, 0), side)


def d_even(e: Expr, make, r: int) -> Expr:
    return boson_derive(e, FieldAtom(_name(make), r))


def _name(make) -> int:
    return {phi: PHI, vphi: VARPHI, psi: PSI, psib: PSIBAR, chi: CHI, chib: CHIBAR,
            f: F, g: G}[make]


def d_plus_field(e: Expr, make, side: str = LEFT) -> Expr:
    """Derivative along X_+ = X_1 + X_2."""
    return basis_derive(e, plus_combo(_name(make)), side)


def d_minus_field(e: Expr, make, side: str = LEFT) -> Expr:
    """Derivative along X_- = X_1 - X_2."""
    return basis_derive(e, minus_combo(_name(make)), side)


# ---------------------------------------------------------------- theories

@dataclass
class DefectTheory:
    kind: str
    lagrangian: Expr
    potentials: dict
    left: int
    right: int
    aux: tuple
    conditions: RewriteSystem | None = None
    params: dict = field(default_factory=dict)


def _cosh_half(*terms) -> Expr:
    return cosh(sum(terms, Expr()) * HALF)


def single_type1_potentials(s: Expr = None) -> tuple[Expr, Expr]:
    """B0, B1 of the single type-I defect; the auxiliary pair is written f[1], g[1]."""
    s = sigma(1) if s is None else s
    s_half = sqrt_sigma(1)
    pp, pm, vp, vm = plus(phi), minus(phi), plus(vphi), minus(vphi)
    b0 = M * s * (cosh(pp) - cosh(vp)) + M * s.inverse() * (cosh(pm) - cosh(vm))
    c_plus = I * SQRT_M * s_half * SQRT2.inverse()
    c_minus = I * SQRT_M * s_half.inverse() * SQRT2.inverse()
    b1 = (c_plus * (_cosh_half(pp, vp) * f(1) * (plus(psi) - plus(chi))
                    + _cosh_half(pp, -vp) * g(1) * (plus(psi) + plus(chi)))
          - c_minus * (_cosh_half(pm, -vm) * f(1) * (minus(psib) + minus(chib))
                       + _cosh_half(pm, vm) * g(1) * (minus(psib) - minus(chib))))
    return b0, b1


def build_single_type1() -> DefectTheory:
    b0, b1 = single_type1_potentials()
    L = (HALF * (phi(2) * phi(1, dt=1) - phi(1) * phi(2, dt=1))
         - HALF * (vphi(2) * vphi(1, dt=1) - vphi(1) * vphi(2, dt=1)) + b0
         - I * (psib(1) * psib(2) + psi(1) * psi(2)) + I * (chib(1) * chib(2) + chi(1) * chi(2))
         + I * HALF * (f(1) * g(1, dt=1) + g(1) * f(1, dt=1)) + b1)
    return DefectTheory("type1-single", L, {"B0": b0, "B1": b1}, 1, 2,
                        (FieldAtom(F, 1), FieldAtom(G, 1)))


def type1_potentials(k: int) -> tuple[Expr, Expr]:
    """B0^(k), B1^(k) coupling region k to the middle region 0."""
    s = sigma(k)
    sgn = -1 if k == 1 else 1  # (-1)^k
    b0 = (M * s * (cosh(phi(0) + phi(k)) - cosh(vphi(0) + vphi(k)))
          + M * s.inverse() * (cosh(phi(0) - phi(k)) - cosh(vphi(0) - vphi(k))))
    cp = I * SQRT_M * sqrt_sigma(k) * SQRT2.inverse()
    cm = I * SQRT_M * sqrt_sigma(k).inverse() * SQRT2.inverse() * sgn
    b1 = (cp * _cosh_half(phi(k), phi(0), vphi(0), vphi(k)) * f(k) * (psi(0) + psi(k) - chi(0) - chi(k))
          + cp * _cosh_half(phi(k), phi(0), -vphi(k), -vphi(0)) * g(k) * (psi(k) + psi(0) + chi(0) + chi(k))
          - cm * _cosh_half(phi(0), -phi(k), vphi(k), -vphi(0)) * f(k) * (psib(0) - psib(k) + chib(0) - chib(k))
          - cm * _cosh_half(phi(0), -phi(k), vphi(0), -vphi(k)) * g(k) * (psib(0) - psib(k) - chib(0) + chib(k)))
    return b0, b1


def type1_lagrangian(k: int) -> Expr:
    b0, b1 = type1_potentials(k)
    sgn = -1 if k == 1 else 1
    return (HALF * (phi(0) * phi(k, dt=1) - phi(k) * phi(0, dt=1))
            - HALF * (vphi(0) * vphi(k, dt=1) - vphi(k) * vphi(0, dt=1))
            + I * (chib(k) * chib(0) + chi(k) * chi(0)) - I * (psib(k) * psib(0) + psi(k) * psi(0))
            - sgn * (I * HALF * f(k) * g(k, dt=1) + I * HALF * g(k) * f(k, dt=1) + b1 + b0))


def build_type1(k: int) -> DefectTheory:
    """Type-I defect k of the pair: k=1 sits at x=0 (regions 1|0), k=2 at x=x0 (regions 0|2).

    The second defect enters the full Lagrangian with a minus sign, so its
    stored ``lagrangian`` is already ``-L_{D_2}``.
    """
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    b0, b1 = type1_potentials(k)
    L = type1_lagrangian(k)
    left, right = (1, 0) if k == 1 else (0, 2)
    if k == 2:
        L = -L
    return DefectTheory(f"type1-{k}", L, {"B0": b0, "B1": b1}, left, right,
                        (FieldAtom(F, k), FieldAtom(G, k)), params={"k": k})


# ---------------------------------------------------------------- fused potentials

def _lin(*pairs) -> Expr:
    out = Expr()
    for c, e in pairs:
        out = out + e * Fraction(c)
    return out


def fused_b0(sign: int, sector=phi) -> Expr:
    """B0^+ (sign=+1) or B0^- (sign=-1) in the sector of ``sector`` (phi or vphi)."""
    p, mm, z = plus(sector), minus(sector), sector(0)
    a = p * HALF + z * sign
    s1, s2 = (sigma(1), sigma(2)) if sign > 0 else (sigma(1).inverse(), sigma(2).inverse())
    return M * HALF * (exp(a) * (s1 * exp(mm * HALF) + s2 * exp(-mm * HALF))
                       + exp(-a) * (s1 * exp(-mm * HALF) + s2 * exp(mm * HALF)))


def b0_plus() -> Expr:
    return fused_b0(1, phi) - fused_b0(1, vphi)


def b0_minus() -> Expr:
    return fused_b0(-1, phi) - fused_b0(-1, vphi)


_Q = Fraction(1, 4)


def b1_plus() -> Expr:
    pp, pm, vp, vm = plus(phi), minus(phi), plus(vphi), minus(vphi)
    c = I * HALF * SQRT_M * SQRT2.inverse()
    r1, r2 = sqrt_sigma(1), sqrt_sigma(2)
    a = (pp + vp) * _Q + (phi(0) + vphi(0)) * HALF
    b = (pm + vm) * _Q
    a2 = (pp - vp) * _Q + (phi(0) - vphi(0)) * HALF
    b2 = (pm - vm) * _Q
    t1 = c * (exp(-a) * (r2 * exp(b) * f(2) + r1 * exp(-b) * f(1))
              + exp(a) * (r2 * exp(-b) * f(2) + r1 * exp(b) * f(1))) * (plus(psi) - plus(chi))
    t2 = c * (exp(-a2) * (r1 * exp(-b2) * g(1) + r2 * exp(b2) * g(2))
              + exp(a2) * (r1 * exp(b2) * g(1) + r2 * exp(-b2) * g(2))) * (plus(psi) + plus(chi))
    cc = I * M * HALF * r1 * r2
    t3 = cc * (cosh(phi(0) + pp * HALF + vm * HALF) + cosh(vphi(0) + vp * HALF + pm * HALF)) * f(1) * g(2)
    t4 = cc * (cosh(phi(0) + pp * HALF - vm * HALF) + cosh(vphi(0) + vp * HALF - pm * HALF)) * g(1) * f(2)
    return t1 + t2 + t3 + t4


def b1_minus() -> Expr:
    pp, pm, vp, vm = plus(phi), minus(phi), plus(vphi), minus(vphi)
    c = -I * HALF * SQRT_M * SQRT2.inverse()
    r1, r2 = sqrt_sigma(1).inverse(), sqrt_sigma(2).inverse()
    a = (pp + vp) * _Q - (phi(0) + vphi(0)) * HALF
    b = (pm + vm) * _Q
    a2 = (pp - vp) * _Q - (phi(0) - vphi(0)) * HALF
    b2 = (pm - vm) * _Q
    t1 = c * (exp(-a) * (r1 * exp(-b) * g(1) - r2 * exp(b) * g(2))
              + exp(a) * (r1 * exp(b) * g(1) - r2 * exp(-b) * g(2))) * (plus(psib) - plus(chib))
    t2 = c * (exp(-a2) * (r1 * exp(-b2) * f(1) - r2 * exp(b2) * f(2))
              + exp(a2) * (r1 * exp(b2) * f(1) - r2 * exp(-b2) * f(2))) * (plus(psib) + plus(chib))
    cc = I * M * HALF * r1 * r2
    t3 = cc * (cosh(phi(0) - pp * HALF + vm * HALF) + cosh(vphi(0) - vp * HALF + pm * HALF)) * f(1) * g(2)
    t4 = cc * (cosh(phi(0) - pp * HALF - vm * HALF) + cosh(vphi(0) - vp * HALF - pm * HALF)) * g(1) * f(2)
    return t1 + t2 + t3 + t4


def type2_fermion_bilinears() -> Expr:
    return (I * (psib(1) * psib(2) - psi(1) * psi(2)) - I * (chib(1) * chib(2) - chi(1) * chi(2)))


def aux_kinetic() -> Expr:
    return I * HALF * (f(1) * g(1, dt=1) + f(2) * g(2, dt=1) + g(1) * f(1, dt=1) + g(2) * f(2, dt=1))


def type2_lagrangian() -> Expr:
    """The final type-II defect Lagrangian with the listed fused potentials."""
    return (HALF * (phi(0) * minus(phi, dt=1) - minus(phi) * phi(0, dt=1))
            - HALF * (vphi(0) * minus(vphi, dt=1) - minus(vphi) * vphi(0, dt=1))
            + type2_fermion_bilinears() + aux_kinetic()
            + b0_plus() + b0_minus() + b1_plus() + b1_minus())


TYPE2_AUX = (FieldAtom(PHI, 0), FieldAtom(VARPHI, 0), FieldAtom(F, 1), FieldAtom(G, 1),
             FieldAtom(F, 2), FieldAtom(G, 2))


def build_type2() -> DefectTheory:
    potentials = {"B0plus": b0_plus(), "B0minus": b0_minus(), "B1plus": b1_plus(),
                  "B1minus": b1_minus()}
    potentials["B0"] = potentials["B0plus"] + potentials["B0minus"]
    potentials["B1"] = potentials["B1plus"] + potentials["B1minus"]
    th = DefectTheory("type2", type2_lagrangian(), potentials, 1, 2, TYPE2_AUX)
    th.conditions = type2_rewrite(th)
    return th


# ---------------------------------------------------------------- defect conditions

def defect_euler_lagrange(LD: Expr, fa: FieldAtom, side: str = LEFT) -> Expr:
    q = JetAtom(fa.name, fa.region, 0, 0)
    return jet_derive(LD, q, side) - dt(jet_derive(LD, q.shifted(dt=1), side))


def derive_defect_conditions(th: DefectTheory, side: str = LEFT) -> dict:
    """Variational conditions at the defect, keyed by the varied FieldAtom.

    A field of the left region picks up +dL/d(q_x) from its bulk action, a field
    of the right region picks up -dL/d(q_x); auxiliary fields have no bulk part.
    """
    out = {}
    for region, sgn in ((th.left, 1), (th.right, -1)):
        Lb = bulk_lagrangian(region).expr
        for n in BOSONS + FERMIONS:
            fa = FieldAtom(n, region)
            q = JetAtom(n, region, 0, 1)
            out[fa] = jet_derive(Lb, q, side) * sgn + defect_euler_lagrange(th.lagrangian, fa, side)
    for fa in th.aux:
        out[fa] = defect_euler_lagrange(th.lagrangian, fa, side)
    return out


def type1_listed_conditions(left: int, right: int, B0: Expr, B1: Expr, k: int,
                            side: str = LEFT) -> dict:
    """A type-I defect between ``left`` and ``right`` as residuals lhs - rhs."""
    B = B0 + B1
    L, R = left, right
    d1 = lambda make, r: d_odd(B1, make, r, side)
    return {
        FieldAtom(PHI, L): phi(L, dx=1) - phi(R, dt=1) + d_even(B, phi, L),
        FieldAtom(VARPHI, L): vphi(L, dx=1) - vphi(R, dt=1) - d_even(B, vphi, L),
        FieldAtom(PHI, R): phi(R, dx=1) - phi(L, dt=1) - d_even(B, phi, R),
        FieldAtom(VARPHI, R): vphi(R, dx=1) - vphi(L, dt=1) + d_even(B, vphi, R),
        FieldAtom(PSI, L): I * (psi(L) - psi(R)) + d1(psi, L),
        FieldAtom(PSI, R): I * (psi(L) - psi(R)) + d1(psi, R),
        FieldAtom(CHI, L): I * (chi(L) - chi(R)) - d1(chi, L),
        FieldAtom(CHI, R): I * (chi(L) - chi(R)) - d1(chi, R),
        FieldAtom(PSIBAR, L): I * (psib(L) + psib(R)) - d1(psib, L),
        FieldAtom(PSIBAR, R): I * (psib(L) + psib(R)) + d1(psib, R),
        FieldAtom(CHIBAR, L): I * (chib(L) + chib(R)) + d1(chib, L),
        FieldAtom(CHIBAR, R): I * (chib(L) + chib(R)) - d1(chib, R),
        # the g-variation gives the f-flow and vice versa
        FieldAtom(G, k): I * f(k, dt=1) + grassmann_derive(B1, JetAtom(G, k, 0, 0), side),
        FieldAtom(F, k): I * g(k, dt=1) + grassmann_derive(B1, JetAtom(F, k, 0, 0), side),
    }


def type2_listed_conditions(th: DefectTheory | None = None, side: str = LEFT) -> dict:
    th = th or build_type2()
    B0, B1 = th.potentials["B0"], th.potentials["B1"]
    B = B0 + B1
    d1 = lambda make, r: d_odd(B1, make, r, side)
    out = {
        FieldAtom(PHI, 1): phi(1, dx=1) - phi(0, dt=1) + d_even(B, phi, 1),
        FieldAtom(PHI, 2): phi(2, dx=1) - phi(0, dt=1) - d_even(B, phi, 2),
        FieldAtom(VARPHI, 1): vphi(1, dx=1) - vphi(0, dt=1) - d_even(B, vphi, 1),
        FieldAtom(VARPHI, 2): vphi(2, dx=1) - vphi(0, dt=1) + d_even(B, vphi, 2),
        FieldAtom(PHI, 0): minus(phi, dt=1) + d_even(B, phi, 0),
        FieldAtom(VARPHI, 0): minus(vphi, dt=1) - d_even(B, vphi, 0),
    }
    for r in (1, 2):
        out[FieldAtom(PSI, r)] = I * minus(psi) + d1(psi, r)
        out[FieldAtom(PSIBAR, r)] = I * minus(psib) - d1(psib, r)
        out[FieldAtom(CHI, r)] = I * minus(chi) - d1(chi, r)
        out[FieldAtom(CHIBAR, r)] = I * minus(chib) + d1(chib, r)
        out[FieldAtom(F, r)] = I * g(r, dt=1) + grassmann_derive(B1, JetAtom(F, r, 0, 0), side)
        out[FieldAtom(G, r)] = I * f(r, dt=1) + grassmann_derive(B1, JetAtom(G, r, 0, 0), side)
    return out


def listed_conditions(th: DefectTheory, side: str = LEFT) -> dict:
    if th.kind == "type2":
        return type2_listed_conditions(th, side)
    k = th.params.get("k", 1)
    return type1_listed_conditions(th.left, th.right, th.potentials["B0"], th.potentials["B1"],
                                   k, side)


def compare_conditions(th: DefectTheory, side: str = LEFT) -> dict:
    """Per-field proportionality constant between derived and listed conditions (None on mismatch)."""
    derived = derive_defect_conditions(th, side)
    listed = listed_conditions(th, side)
    return {fa: proportionality(derived[fa], listed[fa]) for fa in listed}


def discover_convention(th: DefectTheory) -> str:
    """The unique derivative side under which every listed condition is reproduced."""
    ok = [s for s in ("left", "right")
          if all(c is not None for c in compare_conditions(th, s).values())]
    if len(ok) != 1:
        raise ConventionMismatch(f"conventions reproducing the conditions: {ok or 'none'}")
    return ok[0]


# ---------------------------------------------------------------- fusing

_MIDDLE = {PSI: psi, PSIBAR: psib, CHI: chi, CHIBAR: chib}


def _solve_unit(eq: Expr, unknown: JetAtom) -> Expr:
    """Solve the odd linear equation ``eq = 0`` for ``unknown`` (constant coefficient)."""
    c = grassmann_derive(eq, unknown)
    if not c.is_coefficient_monomial():
        raise InconsistentSystem(f"coefficient of {unknown} is not constant: {c}")
    rest = eq - c * Expr.jet(unknown)
    if any(unknown in k[3] for k in rest.terms):
        raise InconsistentSystem(f"{unknown} is not linear in its equation")
    for a in (JetAtom(n, 0, 0, 0) for n in FERMIONS):
        if any(a in k[3] for k in rest.terms):
            raise InconsistentSystem(f"equation for {unknown} also contains {a}")
    return -(c.inverse() * rest)


@dataclass
class Elimination:
    solutions: dict          # JetAtom (region 0 fermion) -> averaged solution
    one_sided: dict          # JetAtom -> (from x=0 defect, from x=x0 defect)
    consistency: dict        # fermion name -> residual of the two one-sided values

    def substitute(self, e: Expr) -> Expr:
        for a, v in self.solutions.items():
            e = substitute_odd(e, a, v)
        return e


def eliminate_auxiliary_fermions(side: str = LEFT) -> Elimination:
    """Solve the pair's fermionic conditions for the middle-region fermions.

    Each middle fermion appears with unit coefficient in one condition of each
    defect (the variation of the adjacent bulk fermion); the two values are
    averaged and their difference is the fused condition.
    """
    d1 = derive_defect_conditions(build_type1(1), side)
    d2 = derive_defect_conditions(build_type1(2), side)
    sols, sided, cons = {}, {}, {}
    for n in FERMIONS:
        a0 = JetAtom(n, 0, 0, 0)
        s_a = _solve_unit(d1[FieldAtom(n, 1)], a0)
        s_b = _solve_unit(d2[FieldAtom(n, 2)], a0)
        sols[a0] = (s_a + s_b) * HALF
        sided[a0] = (s_a, s_b)
        cons[n] = s_a - s_b
    return Elimination(sols, sided, cons)


def u_fn(k: int, sign: int) -> Expr:
    return sinh(((phi(k) + phi(0)) + (vphi(k) + vphi(0)) * sign) * HALF)


def v_fn(k: int, sign: int) -> Expr:
    return sinh(((phi(k) - phi(0)) + (vphi(k) - vphi(0)) * sign) * HALF)


def listed_middle_fermions() -> dict:
    """The four listed expressions for the eliminated middle fermions."""
    du = lambda k, s: d_even(u_fn(k, s), phi, k)
    dv = lambda k, s: d_even(v_fn(k, s), phi, k)
    c = lambda k: SQRT_M * sqrt_sigma(k) * SQRT2.inverse()
    cb = lambda k: SQRT_M * sqrt_sigma(k).inverse() * SQRT2.inverse()
    return {
        JetAtom(PSI, 0, 0, 0): plus(psi) * HALF - c(1) * (du(1, 1) * f(1) + du(1, -1) * g(1))
        + c(2) * (du(2, 1) * f(2) + du(2, -1) * g(2)),
        JetAtom(CHI, 0, 0, 0): plus(chi) * HALF - c(1) * (du(1, 1) * f(1) - du(1, -1) * g(1))
        + c(2) * (du(2, 1) * f(2) - du(2, -1) * g(2)),
        JetAtom(PSIBAR, 0, 0, 0): -plus(psib) * HALF + cb(1) * (dv(1, -1) * f(1) + dv(1, 1) * g(1))
        + cb(2) * (dv(2, -1) * f(2) + dv(2, 1) * g(2)),
        JetAtom(CHIBAR, 0, 0, 0): -plus(chib) * HALF - cb(1) * (dv(1, -1) * f(1) - dv(1, 1) * g(1))
        - cb(2) * (dv(2, -1) * f(2) - dv(2, 1) * g(2)),
    }


def listed_bilinear_identities() -> dict:
    """Right-hand sides of the two listed i(chi_- chi_0 - psi_- psi_0) identities."""
    du = lambda k, s: d_even(u_fn(k, s), phi, k)
    dv = lambda k, s: d_even(v_fn(k, s), phi, k)
    r12 = sqrt_sigma(1) * sqrt_sigma(2)
    plain = (I * HALF * (minus(chi) * plus(chi) - minus(psi) * plus(psi))
             - I * M * r12 * (du(1, 1) * du(2, -1) * f(1) * g(2) + du(1, -1) * du(2, 1) * g(1) * f(2)))
    barred = (-I * HALF * (minus(chib) * plus(chib) - minus(psib) * plus(psib))
              - I * M * r12.inverse() * (dv(1, -1) * dv(2, 1) * f(1) * g(2) + dv(1, 1) * dv(2, -1) * g(1) * f(2)))
    return {"plain": plain, "barred": barred}


def fermionic_minus_rules(cons: dict | None = None, eliminate: int = 1,
                          prolong: tuple = ("t",)) -> RewriteSystem:
    """Rules X_1 -> X_2 + (...) (or X_2 -> X_1 - (...)) from the fused fermionic conditions."""
    cons = cons if cons is not None else eliminate_auxiliary_fermions().consistency
    rules = []
    for n in FERMIONS:
        target = JetAtom(n, eliminate, 0, 0)
        c = grassmann_derive(cons[n], target)
        rest = cons[n] - c * Expr.jet(target)
        rules.append(Rule(target, -(c.inverse() * rest), prolong))
    return RewriteSystem(rules, name="fermion-minus")



def bilinear_identity_residuals(fg_factor=4) -> dict:
    """i(chi_- chi_0 - psi_- psi_0) and its barred twin against the listed forms, modulo the fused conditions.

    ``fg_factor`` rescales the listed f g part; only 4 closes both identities.
    """
    el = eliminate_auxiliary_fermions()
    rs = fermionic_minus_rules(el.consistency)
    s = el.solutions
    a0 = lambda n: s[JetAtom(n, 0, 0, 0)]
    derived = {
        "plain": I * (minus(chi) * a0(CHI) - minus(psi) * a0(PSI)),
        "barred": I * (minus(chib) * a0(CHIBAR) - minus(psib) * a0(PSIBAR)),
    }
    out = {}
    for nm, listed in listed_bilinear_identities().items():
        fg = listed.filter(lambda k: any(a.name in (F, G) for a in k[3]))
        out[nm] = rs(derived[nm] - (listed - fg + fg * fg_factor))
    return out

@dataclass
class FusedResult:
    lagrangian: Expr
    b0: Expr
    b1: Expr
    elimination: Elimination
    minus_rules: RewriteSystem


def fuse(side: str = LEFT, check: bool = False) -> FusedResult:
    """L_{D1} - L_{D2} with the middle fermions eliminated (x0 -> 0 by construction).

    With ``check`` the sigma-split potentials are compared with the listed
    B0^+-, B1^+- and the first mismatch raises ListedFormMismatch.
    """
    elim = eliminate_auxiliary_fermions(side)
    L = build_type1(1).lagrangian + build_type1(2).lagrangian  # second is stored as -L_{D2}
    L = elim.substitute(L)
    b0 = type1_potentials(1)[0] + type1_potentials(2)[0]
    fermionic = L.filter(lambda k: len(k[3]) > 0)
    b1 = fermionic - type2_fermion_bilinears() - aux_kinetic()
    res = FusedResult(L, b0, b1, elim, fermionic_minus_rules(elim.consistency))
    if check:
        listed = (("B0plus", b0_plus()), ("B0minus", b0_minus()), ("B1plus", b1_plus()), ("B1minus", b1_minus()))
        for (name, want), got in zip(listed, split_by_sigma(b0) + split_by_sigma(b1)):
            if got != want:
                raise ListedFormMismatch(name, got - want)
    return res


def split_by_sigma(e: Expr) -> tuple[Expr, Expr]:
    """(positive, negative) total sigma weight parts, e.g. B1 -> (B1^+, B1^-)."""
    return (e.filter(lambda k: k[0][3] + k[0][4] > 0), e.filter(lambda k: k[0][3] + k[0][4] < 0))


def type2_rewrite(th: DefectTheory | None = None, side: str = LEFT) -> RewriteSystem:
    """Type-II conditions oriented to eliminate boundary x-jets, phi_1 t-jets, X_1 fermions and aux t-jets."""
    pots = th.potentials if th is not None else build_type2().potentials
    B0, B1 = pots["B0"], pots["B1"]
    B = B0 + B1
    d1 = lambda make, r: d_odd(B1, make, r, side)
    t = ("t",)
    rules = [
        Rule(JetAtom(PHI, 1, 0, 1), phi(0, dt=1) - d_even(B, phi, 1), t),
        Rule(JetAtom(PHI, 2, 0, 1), phi(0, dt=1) + d_even(B, phi, 2), t),
        Rule(JetAtom(VARPHI, 1, 0, 1), vphi(0, dt=1) + d_even(B, vphi, 1), t),
        Rule(JetAtom(VARPHI, 2, 0, 1), vphi(0, dt=1) - d_even(B, vphi, 2), t),
        Rule(JetAtom(PHI, 1, 1, 0), phi(2, dt=1) - d_even(B, phi, 0), t),
        Rule(JetAtom(VARPHI, 1, 1, 0), vphi(2, dt=1) + d_even(B, vphi, 0), t),
        # i(X_1 - X_2) = -+ dB1/dX_1
        Rule(JetAtom(PSI, 1, 0, 0), psi(2) + I * d1(psi, 1), t),
        Rule(JetAtom(PSIBAR, 1, 0, 0), psib(2) - I * d1(psib, 1), t),
        Rule(JetAtom(CHI, 1, 0, 0), chi(2) - I * d1(chi, 1), t),
        Rule(JetAtom(CHIBAR, 1, 0, 0), chib(2) + I * d1(chib, 1), t),
    ]
    for k in (1, 2):
        rules.append(Rule(JetAtom(G, k, 1, 0), I * grassmann_derive(B1, JetAtom(F, k, 0, 0), side), t))
        rules.append(Rule(JetAtom(F, k, 1, 0), I * grassmann_derive(B1, JetAtom(G, k, 0, 0), side), t))
    return RewriteSystem(rules, max_passes=64, name="type2-conditions")


# ---------------------------------------------------------------- Backlund transformations
# Light-cone chart: the dt slot of a jet counts d_- and the dx slot counts d_+.

def lc(make, r: int, minus_n: int = 0, plus_n: int = 0) -> Expr:
    return make(r, dt=minus_n, dx=plus_n)


def lc_plus(e: Expr) -> Expr:
    return dx(e)


def lc_minus(e: Expr) -> Expr:
    return dt(e)


def _du0(k, s):
    return d_even(u_fn(k, s), phi, 0)


def _dv0(k, s):
    return d_even(v_fn(k, s), phi, 0)


def _ch(*terms):
    return cosh(sum(terms, Expr()))


def _sh(*terms):
    return sinh(sum(terms, Expr()))


@dataclass
class BacklundRelation:
    name: str
    lhs: Expr
    rhs: Expr

    @property
    def residual(self) -> Expr:
        return self.lhs - self.rhs


def build_backlund(flip: str | None = None) -> dict:
    """The 20 type-II Backlund relations (light-cone chart), keyed by name.

    ``flip`` negates the fermion-bilinear-free second piece of the ``dplus_f1``
    relation (negative control).
    """
    s2m = SQRT2 * SQRT_M
    r1, r2 = sqrt_sigma(1), sqrt_sigma(2)
    r12 = r1 * r2
    h = HALF
    pp, pm, vp, vm = plus(phi), minus(phi), plus(vphi), minus(vphi)
    p0, v0 = phi(0), vphi(0)
    Pp, Pbp = plus(psi) - plus(chi), plus(psi) + plus(chi)
    Bm, Bp = plus(psib) - plus(chib), plus(psib) + plus(chib)
    rel = {}

    def add(name, lhs, rhs):
        rel[name] = BacklundRelation(name, lhs, rhs)

    add("psi_minus", minus(psi), s2m * (r1 * (_du0(1, 1) * f(1) + _du0(1, -1) * g(1))
                                        + r2 * (_du0(2, 1) * f(2) + _du0(2, -1) * g(2))))
    add("psibar_minus", minus(psib), -s2m * (r1.inverse() * (_dv0(1, 1) * g(1) + _dv0(1, -1) * f(1))
                                             - r2.inverse() * (_dv0(2, 1) * g(2) + _dv0(2, -1) * f(2))))
    add("chi_minus", minus(chi), s2m * (r1 * (_du0(1, 1) * f(1) - _du0(1, -1) * g(1))
                                        + r2 * (_du0(2, 1) * f(2) - _du0(2, -1) * g(2))))
    add("chibar_minus", minus(chib), -s2m * (r1.inverse() * (_dv0(1, 1) * g(1) - _dv0(1, -1) * f(1))
                                             - r2.inverse() * (_dv0(2, 1) * g(2) - _dv0(2, -1) * f(2))))

    cm = M * h * r12.inverse()
    cp = M * h * r12
    sm = lambda k: s2m * sqrt_sigma(k).inverse()
    sp = lambda k: s2m * sqrt_sigma(k)
    A = lambda sa, sb: _ch(p0, -pp * h, vm * h * sa) + _ch(v0, -vp * h, pm * h * sb)
    Bq = lambda sa, sb: _ch(p0, pp * h, vm * h * sa) + _ch(v0, vp * h, pm * h * sb)
    add("dminus_g1", lc(g, 1, 1, 0), cm * A(1, 1) * g(2) + sm(1) * _dv0(1, -1) * Bp)
    add("dplus_g1", lc(g, 1, 0, 1), -cp * Bq(1, 1) * g(2) - sp(1) * _du0(1, 1) * Pp)
    add("dminus_f1", lc(f, 1, 1, 0), cm * A(-1, -1) * f(2) + sm(1) * _dv0(1, 1) * Bm)
    second = -sp(1) * _du0(1, -1) * Pbp
    if flip == "dplus_f1":
        second = -second
    add("dplus_f1", lc(f, 1, 0, 1), -cp * Bq(-1, -1) * f(2) + second)
    add("dminus_g2", lc(g, 2, 1, 0), -cm * A(-1, -1) * g(1) - sm(2) * _dv0(2, -1) * Bp)
    add("dplus_g2", lc(g, 2, 0, 1), cp * Bq(-1, -1) * g(1) - sp(2) * _du0(2, 1) * Pp)
    add("dminus_f2", lc(f, 2, 1, 0), -cm * A(1, 1) * f(1) - sm(2) * _dv0(2, 1) * Bm)
    add("dplus_f2", lc(f, 2, 0, 1), cp * Bq(1, 1) * f(1) - sp(2) * _du0(2, -1) * Pbp)

    cf = I * h * SQRT_M * SQRT2.inverse()
    for sector in (phi, vphi):
        xp, xm, x0 = plus(sector), minus(sector), sector(0)

        def bos(sgn0, s_a, s_b, inv):
            a = xp * h + x0 * sgn0
            q1, q2 = (sigma(1), sigma(2)) if not inv else (sigma(1).inverse(), sigma(2).inverse())
            return -M * h * (exp(a) * (q1 * exp(xm * h) + s_b * q2 * exp(-xm * h))
                             - exp(-a) * (q1 * exp(-xm * h) + s_b * q2 * exp(xm * h)))

        uf = lambda s: r1 * u_fn(1, 1) * f(1) + s * r2 * u_fn(2, 1) * f(2)
        ug = lambda s: r1 * u_fn(1, -1) * g(1) + s * r2 * u_fn(2, -1) * g(2)
        vg = lambda s: r1.inverse() * v_fn(1, 1) * g(1) + s * r2.inverse() * v_fn(2, 1) * g(2)
        vf = lambda s: r1.inverse() * v_fn(1, -1) * f(1) + s * r2.inverse() * v_fn(2, -1) * f(2)
        # phi sector: uf(Pp) and ug(Pbp) enter with the same sign; varphi sector: opposite
        if sector is phi:
            ferm_p = lambda s: -cf * (uf(s) * Pp + ug(s) * Pbp)
            ferm_m = lambda s: cf * (vg(s) * Bm + vf(s) * Bp)
            nm = "phi"
        else:
            ferm_p = lambda s: cf * (uf(s) * Pp - ug(s) * Pbp)
            ferm_m = lambda s: -cf * (vg(s) * Bm - vf(s) * Bp)
            nm = "varphi"
        # four-fermion-free f g terms
        if sector is phi:
            fg_pm = -I * M * h * r12 * (_sh(p0, pp * h, vm * h) * f(1) * g(2) + _sh(p0, pp * h, -vm * h) * g(1) * f(2))
            fg_mm = I * M * h * r12.inverse() * (_sh(p0, -pp * h, vm * h) * f(1) * g(2) + _sh(p0, -pp * h, -vm * h) * g(1) * f(2))
            fg_m0 = -I * M * h * r12.inverse() * (_sh(v0, -vp * h, pm * h) * f(1) * g(2) - _sh(v0, -vp * h, -pm * h) * g(1) * f(2))
            fg_p0 = -I * M * h * r12 * (_sh(v0, vp * h, pm * h) * f(1) * g(2) - _sh(v0, vp * h, -pm * h) * g(1) * f(2))
        else:
            fg_pm = I * M * h * r12 * (_sh(v0, vp * h, pm * h) * f(1) * g(2) + _sh(v0, vp * h, -pm * h) * g(1) * f(2))
            fg_mm = -I * M * h * r12.inverse() * (_sh(v0, -vp * h, pm * h) * f(1) * g(2) + _sh(v0, -vp * h, -pm * h) * g(1) * f(2))
            fg_m0 = I * M * h * r12.inverse() * (_sh(p0, -pp * h, vm * h) * f(1) * g(2) - _sh(p0, -pp * h, -vm * h) * g(1) * f(2))
            fg_p0 = I * M * h * r12 * (_sh(p0, pp * h, vm * h) * f(1) * g(2) - _sh(p0, pp * h, -vm * h) * g(1) * f(2))
        add(f"dplus_{nm}_minus", lc_plus(xm), bos(1, 1, 1, False) + ferm_p(1) + fg_pm)
        add(f"dminus_{nm}_minus", lc_minus(xm), bos(-1, 1, 1, True) + ferm_m(-1) + fg_mm)
        add(f"dminus_{nm}_plus_2zero", lc_minus(xp + 2 * x0), bos(-1, 1, -1, True) + ferm_m(1) + fg_m0)
        add(f"dplus_{nm}_plus_2zero", lc_plus(xp - 2 * x0), bos(1, 1, -1, False) + ferm_p(-1) + fg_p0)
    return rel


# ---------------------------------------------------------------- Backlund consistency

_FERMION_KEYS = {PSI: "psi_minus", PSIBAR: "psibar_minus", CHI: "chi_minus", CHIBAR: "chibar_minus"}
_SECTORS = ((PHI, "phi", phi), (VARPHI, "varphi", vphi))


def _boson_flow_rules(rel: dict) -> list:
    """First-order light-cone flows of the bulk bosons, solved from the four relations per sector."""
    rules = []
    for n, nm, mk in _SECTORS:
        a = rel[f"dplus_{nm}_minus"].rhs
        b = rel[f"dminus_{nm}_minus"].rhs
        c = rel[f"dminus_{nm}_plus_2zero"].rhs
        d = rel[f"dplus_{nm}_plus_2zero"].rhs
        r_plus = {1: (a + d) * HALF + lc(mk, 0, 0, 1), 2: (d - a) * HALF + lc(mk, 0, 0, 1)}
        r_minus = {1: (b + c) * HALF - lc(mk, 0, 1, 0), 2: (c - b) * HALF - lc(mk, 0, 1, 0)}
        for r in (1, 2):
            mixed = (lc_minus(r_plus[r]) + lc_plus(r_minus[r])) * HALF
            rules.append(Rule(JetAtom(n, r, 1, 1), mixed, ("t", "x")))
        for r in (1, 2):
            rules.append(Rule(JetAtom(n, r, 0, 1), r_plus[r], ("x",)))
            rules.append(Rule(JetAtom(n, r, 1, 0), r_minus[r], ("t",)))
    return rules


def _aux_flow_rules(rel: dict) -> list:
    rules = []
    for mk, nm in ((f, "f"), (g, "g")):
        for k in (1, 2):
            rules.append(Rule(JetAtom(_name(mk), k, 1, 0), rel[f"dminus_{nm}{k}"].rhs, ("t",)))
            rules.append(Rule(JetAtom(_name(mk), k, 0, 1), rel[f"dplus_{nm}{k}"].rhs, ("x",)))
    return rules


def _fermion_algebraic_rules(rel: dict, eliminate: int) -> list:
    rules = []
    for n, key in _FERMION_KEYS.items():
        mk = _MIDDLE[n]
        d = rel[key].rhs
        if eliminate == 1:
            rules.append(Rule(JetAtom(n, 1, 0, 0), mk(2) + d, ("t", "x")))
        else:
            rules.append(Rule(JetAtom(n, 2, 0, 0), mk(1) - d, ("t", "x")))
    return rules


def backlund_system(rel: dict, eliminate: int = 1) -> RewriteSystem:
    """Light-cone on-shell rules: region ``eliminate`` fermions are solved away, the other region's
    fermions obey their bulk equations, and all first jets of the flows are eliminated."""
    from .model import bulk_eom_rewrite

    other = 2 if eliminate == 1 else 1
    bulk = bulk_eom_rewrite(regions=(other,), chart="lc", fields=("psi", "psibar", "chi", "chibar"))
    rules = (_fermion_algebraic_rules(rel, eliminate) + list(bulk.rules)
             + _boson_flow_rules(rel) + _aux_flow_rules(rel))
    return RewriteSystem(rules, max_passes=96, name=f"backlund-{eliminate}")


BACKLUND_CHECKS = tuple(
    [f"{nm}{r}" for r in (1, 2) for nm in ("psi", "psibar", "chi", "chibar", "phi", "varphi")]
    + ["f1", "f2", "g1", "g2", "phi-minus-cross", "varphi-minus-cross"])

_LC_TARGET = {
    "psi": (lambda r: lc(psi, r, 1, 0), HALF), "psibar": (lambda r: lc(psib, r, 0, 1), HALF),
    "chi": (lambda r: lc(chi, r, 1, 0), HALF), "chibar": (lambda r: lc(chib, r, 0, 1), HALF),
    "phi": (lambda r: lc(phi, r, 1, 1), Fraction(1, 4)),
    "varphi": (lambda r: lc(vphi, r, 1, 1), Fraction(1, 4)),
}

_BACKLUND_CACHE: dict = {}


def _backlund_context(flip):
    if flip not in _BACKLUND_CACHE:
        rel = build_backlund(flip)
        _BACKLUND_CACHE[flip] = (rel, {1: backlund_system(rel, 1), 2: backlund_system(rel, 2)})
    return _BACKLUND_CACHE[flip]


def backlund_residual(name: str, flip: str | None = None) -> Expr:
    """On-shell residual of one consistency check (see ``BACKLUND_CHECKS``).

    ``psi1`` .. ``varphi2`` compare the light-cone derivative implied by the
    relations with the bulk equation of that field; ``f1`` .. ``g2`` and the
    ``-minus-cross`` checks are cross-derivative integrability conditions.
    """
    from .model import bulk_eom_rhs

    rel, systems = _backlund_context(flip)
    if name.endswith("-minus-cross"):
        nm = name[: -len("-minus-cross")]
        a = rel[f"dplus_{nm}_minus"].rhs
        b = rel[f"dminus_{nm}_minus"].rhs
        return systems[1](lc_minus(a) - lc_plus(b))
    if name[0] in "fg" and name[1:] in ("1", "2"):
        rp, rm = rel[f"dplus_{name}"].rhs, rel[f"dminus_{name}"].rhs
        return systems[1](lc_plus(rm) - lc_minus(rp))
    nm, r = name[:-1], int(name[-1])
    if nm not in _LC_TARGET or r not in (1, 2):
        raise KeyError(f"unknown Backlund check {name!r}")
    make, w = _LC_TARGET[nm]
    return systems[r](make(r) - bulk_eom_rhs(r)[nm] * w)


def backlund_residuals(flip: str | None = None) -> dict:
    return {n: backlund_residual(n, flip) for n in BACKLUND_CHECKS}


def backlund_potential_residuals() -> dict:
    """Fermion-free parts of the bosonic flows against gradients of the fused B0 parts."""
    rel = build_backlund()
    bos = lambda e: e.filter(lambda k: not k[3])
    out = {}
    for _, nm, mk in _SECTORS:
        s = 1 if mk is phi else -1
        out[f"dplus_{nm}_minus"] = bos(rel[f"dplus_{nm}_minus"].rhs) + 2 * s * d_plus_field(b0_plus(), mk)
        out[f"dminus_{nm}_minus"] = bos(rel[f"dminus_{nm}_minus"].rhs) + 2 * s * d_plus_field(b0_minus(), mk)
        out[f"dminus_{nm}_plus_2zero"] = bos(rel[f"dminus_{nm}_plus_2zero"].rhs) + 2 * s * d_minus_field(b0_minus(), mk)
        out[f"dplus_{nm}_plus_2zero"] = bos(rel[f"dplus_{nm}_plus_2zero"].rhs) + 2 * s * d_minus_field(b0_plus(), mk)
    return out


def backlund_fermion_agreement() -> dict:
    """The four algebraic relations against the fused fermionic conditions."""
    rel = build_backlund()
    cons = eliminate_auxiliary_fermions().consistency
    rs = fermionic_minus_rules(cons)
    out = {}
    for n, key in _FERMION_KEYS.items():
        out[key] = rs(rel[key].residual)
    return out


def backlund_bosonic_limit() -> dict:
    """With all fermions and auxiliary fermions set to zero the checks stay closed."""
    out = {}
    for name in ("phi1", "phi2", "varphi1", "varphi2", "phi-minus-cross", "varphi-minus-cross"):
        out[name] = set_zero(backlund_residual(name), lambda a: a.odd)
    return out
