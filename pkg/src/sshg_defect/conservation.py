"""Boundary-jet reduction at the type-II defect and the modified conserved charges."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .defects import (
    DefectTheory, build_type2, d_even, d_minus_field, d_plus_field, fermionic_minus_rules,
    type2_rewrite, u_fn, v_fn,
)
from .fields import HALF, I, M, SQRT2, SQRT_M, chi, chib, cosh, f, g, phi, psi, psib, sinh, sqrt_sigma, vphi
from .model import bulk_charge_density, bulk_eom_rewrite, derived_potentials, pt_transform
from .symexpr import (
    F, G, Expr, JetAtom, RewriteSystem, contains_any, dt,
    grassmann_derive, set_zero,
)


class ResidualNonZero(AssertionError):
    def __init__(self, what: str, residual: Expr):
        first = residual.sorted_terms()[0] if residual.terms else None
        super().__init__(f"{what}: {len(residual)} residual terms, first {first}")
        self.residual = residual


@dataclass
class BoundaryJetBasis:
    """Rules mapping every dependent boundary jet into the independent basis."""
    eliminated: RewriteSystem

    def reduce(self, e: Expr) -> Expr:
        return self.eliminated(e)

    def is_reduced(self, e: Expr) -> bool:
        return not contains_any(e, self.eliminated)


def build_boundary_basis(th: DefectTheory | None = None) -> BoundaryJetBasis:
    """Bulk second x-jets and fermion x-jets go through the bulk equations, then the defect conditions
    remove the remaining x-jets, phi_1 t-jets, region-1 fermions and auxiliary t-jets."""
    th = th or build_type2()
    bulk = bulk_eom_rewrite(regions=(1, 2), chart="tx")
    cond = th.conditions or type2_rewrite(th)
    return BoundaryJetBasis(bulk.extended(cond, name="boundary"))


@lru_cache(maxsize=None)
def default_basis() -> BoundaryJetBasis:
    return build_boundary_basis(_theory())


@lru_cache(maxsize=None)
def _theory() -> DefectTheory:
    return build_type2()


# ---------------------------------------------------------------- defect terms

@dataclass(frozen=True)
class ModifiedCharge:
    kind: str
    defect_term: Expr


def defect_term(kind: str) -> Expr:
    th = _theory()
    p = th.potentials
    if kind == "P":
        return (p["B1plus"] + p["B0plus"] - p["B1minus"] - p["B0minus"]
                + I * (-psi(1) * psi(2) - psib(1) * psib(2) + chi(1) * chi(2) + chib(1) * chib(2)))
    if kind == "E":
        return (p["B0"] + p["B1"]
                + I * (psib(1) * psib(2) - psi(1) * psi(2) + chi(1) * chi(2) - chib(1) * chib(2)))
    s2m = SQRT2 * SQRT_M
    if kind in ("Q1", "Q2"):
        s = 1 if kind == "Q1" else -1
        return sum((-I * s2m * sqrt_sigma(k) * (u_fn(k, 1) * f(k) + u_fn(k, -1) * g(k) * s)
                    for k in (1, 2)), Expr())
    if kind in ("Q1bar", "Q2bar"):
        s = 1 if kind == "Q1bar" else -1
        out = Expr()
        for k in (1, 2):
            sgn = (-1) ** k if kind == "Q1bar" else (-1) ** (k - 1)
            out = out + I * s2m * sqrt_sigma(k).inverse() * sgn * (v_fn(k, -1) * f(k) + v_fn(k, 1) * g(k) * s)
        return out
    raise ValueError(f"unknown charge kind {kind!r}")


def modified_charge(kind: str) -> ModifiedCharge:
    return ModifiedCharge(kind, defect_term(kind))


# ---------------------------------------------------------------- listed boundary expressions

def listed_boundary_rate(kind: str) -> Expr:
    """The displayed boundary value of d(bulk charge)/dt for P, E and Q1."""
    if kind == "P":
        v1, w1 = derived_potentials(1)
        v2, w2 = derived_potentials(2)
        out = Expr()
        for r, s in ((1, 1), (2, -1)):
            out = out + s * (HALF * phi(r, dx=1) ** 2 + HALF * phi(r, dt=1) ** 2
                             - HALF * vphi(r, dx=1) ** 2 - HALF * vphi(r, dt=1) ** 2
                             - I * (psi(r) * psi(r, dt=1) + psib(r) * psib(r, dt=1))
                             + I * (chi(r) * chi(r, dt=1) + chib(r) * chib(r, dt=1)))
        return out - v1 + v2 - w1 + w2
    if kind == "E":
        out = Expr()
        for r, s in ((1, 1), (2, -1)):
            out = out + s * (phi(r, dt=1) * phi(r, dx=1) - vphi(r, dt=1) * vphi(r, dx=1)
                             - I * (psi(r) * psi(r, dt=1) - psib(r) * psib(r, dt=1))
                             + I * (chi(r) * chi(r, dt=1) - chib(r) * chib(r, dt=1)))
        return out
    if kind == "Q1":
        out = Expr()
        for r, s in ((1, 1), (2, -1)):
            sc = sinh(phi(r)) * cosh(vphi(r))
            cs = cosh(phi(r)) * sinh(vphi(r))
            out = out + s * (I * psi(r) * (phi(r, dx=1) + phi(r, dt=1)) + I * chi(r) * (vphi(r, dx=1) + vphi(r, dt=1))
                             + 2 * I * M * psib(r) * sc - 2 * I * M * chib(r) * cs)
        return out
    raise ValueError(f"no listed boundary rate for {kind!r}")


def derived_boundary_rate(kind: str) -> Expr:
    """flux_1 - flux_2 at the defect, from the bulk fluxes."""
    return bulk_charge_density(kind, 1).flux - bulk_charge_density(kind, 2).flux


# ---------------------------------------------------------------- checks

def charge_residual(kind: str, route: str = "derived", with_defect: bool = True,
                    basis: BoundaryJetBasis | None = None) -> Expr:
    """Reduced d/dt of (bulk charge + defect term); zero when the modified charge is conserved."""
    basis = basis or default_basis()
    rate = derived_boundary_rate(kind) if route == "derived" else listed_boundary_rate(kind)
    total = rate + dt(defect_term(kind)) if with_defect else rate
    return basis.reduce(total)


def rate_agreement(kind: str, basis: BoundaryJetBasis | None = None) -> Expr:
    """Listed minus derived boundary rate, reduced (both routes must agree)."""
    basis = basis or default_basis()
    return basis.reduce(listed_boundary_rate(kind) - derived_boundary_rate(kind))


def pt_charge_residuals() -> dict:
    return {
        "Q": pt_transform(defect_term("Q1"), "defect") - defect_term("Q2"),
        "Qbar": pt_transform(defect_term("Q1bar"), "defect") - defect_term("Q2bar"),
    }


def unmodified_obstruction(kind: str = "Q1") -> Expr:
    """Charge residual with the defect term dropped and f_k = g_k = 0 (must be nonzero)."""
    r = charge_residual(kind, with_defect=False)
    return set_zero(r, lambda a: a.name in (F, G))


# ---------------------------------------------------------------- relation lattice

def _b(name: str) -> Expr:
    return _theory().potentials[name]


def relation_residuals() -> dict:
    """The fermionic-gradient and phi_0 / phi_+ relations obeyed by the fused potentials."""
    B1, B1p, B1m = _b("B1"), _b("B1plus"), _b("B1minus")
    out = {}
    for nm, mk in (("psi", psi), ("psibar", psib), ("chi", chi), ("chibar", chib)):
        out[f"d_{nm}_minus B1"] = d_minus_field(B1, mk)
    out["d_psi_plus B1minus"] = d_plus_field(B1m, psi)
    out["d_psibar_plus B1plus"] = d_plus_field(B1p, psib)
    out["d_chi_plus B1minus"] = d_plus_field(B1m, chi)
    out["d_chibar_plus B1plus"] = d_plus_field(B1p, chib)
    for sector, mk in (("phi", phi), ("varphi", vphi)):
        for nm in ("B0plus", "B1plus", "B0minus", "B1minus"):
            s = 2 if nm.endswith("plus") else -2
            e = _b(nm)
            out[f"d_{sector}0 {nm}"] = d_even(e, mk, 0) - s * d_plus_field(e, mk)
    return out


def _dm(e, mk):
    return d_minus_field(e, mk)


def bracket_residuals(modulo: bool = False) -> dict:
    """The two potential identities and the B1 constraint; ``modulo`` reduces by the fermionic conditions."""
    B0p, B0m, B1p, B1m = _b("B0plus"), _b("B0minus"), _b("B1plus"), _b("B1minus")
    v1, w1 = derived_potentials(1)
    v2, w2 = derived_potentials(2)
    d0 = lambda e, mk: d_even(e, mk, 0)

    def pair(a_p, a_m, b_p, b_m, mk):
        return d0(a_p, mk) * _dm(b_m, mk) - d0(a_m, mk) * _dm(b_p, mk)

    v_rhs = 2 * (pair(B0p, B0m, B0p, B0m, phi) - pair(B0p, B0m, B0p, B0m, vphi))
    w_rhs = (2 * (pair(B1p, B1m, B0p, B0m, phi) + pair(B0p, B0m, B1p, B1m, phi))
             - 2 * (pair(B1p, B1m, B0p, B0m, vphi) + pair(B0p, B0m, B1p, B1m, vphi)))
    for k in (1, 2):
        fk, gk = JetAtom(F, k, 0, 0), JetAtom(G, k, 0, 0)
        w_rhs = w_rhs + 2 * I * (grassmann_derive(B1m, fk) * grassmann_derive(B1p, gk)
                                 - grassmann_derive(B1p, fk) * grassmann_derive(B1m, gk))
    constraint = pair(B1p, B1m, B1p, B1m, phi) - pair(B1p, B1m, B1p, B1m, vphi)
    out = {"V": (v1 - v2) - v_rhs, "W": (w1 - w2) - w_rhs, "constraint": constraint}
    if modulo:
        rs = fermionic_minus_rules(prolong=())
        out = {k: rs(e) for k, e in out.items()}
    return out
