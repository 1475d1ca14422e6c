import pytest
from hypothesis import given, settings

from sshg_defect import checks, model
from sshg_defect.fields import HALF, I, M, chi, cosh, phi, psi, psib, vphi
from sshg_defect.symexpr import (
    CHI, PHI, PSI, PSIBAR, Expr, FieldAtom, JetAtom, Rule, RewriteSystem, dt, dx, evaluate, set_zero,
)

from strategies import exprs


def _zero_values(e):
    vals = {}
    for (_, form, jets, _), _c in e.terms.items():
        for fa, _q in form:
            vals[fa] = 0.0
        for a, _p in jets:
            vals[a] = 0.0
    return vals


# ---------------------------------------------------------------- Lagrangian

def test_bosonic_limit_text_and_massless_checks():
    assert checks.run_check("bulk-lagrangian").status == "pass"


def test_lagrangian_is_even_and_first_order():
    L = model.bulk_lagrangian(1).expr
    assert L.parity() == 0
    assert all(a.order <= 1 for a in L.atoms() if hasattr(a, "order"))


def test_massless_lagrangian_keeps_only_kinetic_terms():
    L = model.with_m_zero(model.bulk_lagrangian(2).expr)
    assert not any(form for (_, form, _, _) in L.terms)


def test_two_constructions_agree_term_for_term():
    a, b = model.bulk_lagrangian(1).expr, model.bulk_lagrangian_text(1).expr
    assert a == b and len(a) == len(b)


# ---------------------------------------------------------------- field equations

def test_free_scalar_euler_lagrange():
    L = HALF * phi(1, dx=1) ** 2 - HALF * phi(1, dt=1) ** 2
    el = model.euler_lagrange(L, FieldAtom(PHI, 1))
    assert model.proportionality(el, phi(1, dx=2) - phi(1, dt=2)) is not None


def test_phi_equation_up_to_constant():
    el = model.euler_lagrange(model.bulk_lagrangian(1), FieldAtom(PHI, 1))
    ref = model.bulk_eom_reference(1)["phi"]
    c = model.proportionality(el, ref)
    assert c is not None and (el - c * ref).is_zero()


def test_eom_constants_frozen():
    # [DERIVED] raw Euler-Lagrange output relative to the printed equations
    consts = {n: c for n, (_, _, c) in checks._eom_constants().items()}
    want = {"phi": Expr.const(-1), "varphi": Expr.const(1), "psi": -2 * I, "psibar": 2 * I,
            "chi": 2 * I, "chibar": -2 * I}
    assert consts == want
    # equal magnitude within the bosons and within the fermions
    assert consts["phi"] == -consts["varphi"]
    assert consts["psi"] == -consts["psibar"] == -consts["chi"] == consts["chibar"]


def test_all_six_equations_match():
    r = checks.run_check("bulk-eom")
    assert r.status == "pass" and r.residual_terms == 0


def test_corrupted_equation_is_detected():
    res = checks._bulk_eom("left", corrupt=True)
    assert checks._count(res) > 0


# ---------------------------------------------------------------- susy

def test_delta1_of_phi():
    d = model.delta1((1,))
    assert model.susy_vary(phi(1, dt=1), d) == dt(I * psi(1))
    assert d.rules[FieldAtom(PHI, 1)] == I * psi(1)


def test_delta1_of_constant_vanishes():
    assert model.susy_vary(Expr.const(7) * M, model.delta1()).is_zero()


def test_variations_flip_parity():
    for fa, v in model.delta1((1, 2)).rules.items():
        assert v.parity() == 1 - fa.parity


def test_susy_commutes_with_total_derivatives():
    d = model.delta1((1,))
    e = model.q1_density(1)
    assert model.susy_vary(dx(e), d) == dx(model.susy_vary(e, d))


def test_total_derivative_identity_off_shell():
    assert model.susy_identity_residual(1).is_zero()


def test_total_derivative_identity_massless():
    assert model.susy_identity_residual(1, m_zero=True).is_zero()


def test_flipped_x_bracket_breaks_identity():
    bad = model.susy_identity_residual(1, model.variation_brackets(1, flip="dx_bracket"))
    assert not bad.is_zero()


def test_delta1_of_each_equation_vanishes_on_shell():
    rs = model.bulk_eom_rewrite((1,))
    ref = model.bulk_eom_reference(1)
    d = model.delta1((1,))
    for n in model.FIELD_NAMES:
        assert rs(model.susy_vary(ref[n], d)).is_zero(), n


# ---------------------------------------------------------------- PT

def test_pt_fixes_bulk_lagrangian():
    L = model.bulk_lagrangian(1).expr
    assert model.pt_transform(L) == L


def test_pt_maps_supercharges():
    assert model.pt_transform(model.q1_density(1)) == model.q2_density(1)
    assert model.pt_transform(model.q1bar_density(1)) == model.q2bar_density(1)


def test_pt_rejects_unknown_context():
    with pytest.raises(ValueError):
        model.pt_transform(phi(1), "boundary")


@settings(max_examples=150)
@given(exprs())
def test_pt_is_involution(e):
    for ctx in ("bulk", "type1", "defect"):
        assert model.pt_transform(model.pt_transform(e, ctx), ctx) == e


# ---------------------------------------------------------------- charges

def test_momentum_density_matches_noether():
    p, _ = model.noether_momentum(model.bulk_lagrangian(1).expr, 1)
    assert p == model.momentum_density(1)
    assert model.bulk_charge_density("P", 1).bulk_expr == model.momentum_density(1)


def test_energy_potentials_fixed_by_derivation():
    v, w = model.derived_potentials(1)
    # V = m^2 [cosh 2phi - cosh 2varphi]
    assert v == M ** 2 * (cosh(phi(1) * 2) - cosh(vphi(1) * 2))
    assert w.parity() == 0 and w.terms
    assert set_zero(w, lambda a: a.odd).is_zero()


def _gradient_part(q, atom):
    return q.filter(lambda k: k[3] == (atom,) and not k[1])


def test_q1_density_listed_form():
    q = model.q1_density(1)
    assert _gradient_part(q, JetAtom(PSI, 1, 0, 0)) == I * psi(1) * (phi(1, dx=1) + phi(1, dt=1))
    assert _gradient_part(q, JetAtom(CHI, 1, 0, 0)) == I * chi(1) * (vphi(1, dx=1) + vphi(1, dt=1))


def test_q1bar_density_gradient_part():
    q = model.q1bar_density(1)
    assert _gradient_part(q, JetAtom(PSIBAR, 1, 0, 0)) == I * psib(1) * (phi(1, dx=1) - phi(1, dt=1))


@pytest.mark.parametrize("kind", model.CHARGE_KINDS)
def test_density_parities(kind):
    c = model.bulk_charge_density(kind, 1)
    assert c.bulk_expr.parity() == (0 if kind in ("E", "P") else 1)


@pytest.mark.parametrize("kind", model.CHARGE_KINDS)
def test_bulk_conservation_laws(kind):
    c = model.bulk_charge_density(kind, 1)
    rs = model.bulk_eom_rewrite((1,))
    assert rs(dt(c.bulk_expr) - dx(c.flux)).is_zero()


def test_vacuum_densities():
    p = set_zero(model.momentum_density(1), lambda a: a.odd)
    assert evaluate(p, _zero_values(p), 1.0) == 0
    e = set_zero(model.bulk_charge_density("E", 1).bulk_expr, lambda a: a.odd)
    # V(0) = m^2 (cosh 0 - cosh 0) = 0 for any m
    assert evaluate(e, _zero_values(e), 1.7) == pytest.approx(0.0, abs=1e-15)


def test_rewrite_rule_shape():
    rs = model.bulk_eom_rewrite((1,))
    assert isinstance(rs, RewriteSystem) and all(isinstance(r, Rule) for r in rs.rules)
    assert any(r.lhs.name == PSI for r in rs.rules)
