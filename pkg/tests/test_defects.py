import pytest

from sshg_defect import checks
from sshg_defect import defects as D
from sshg_defect.model import proportionality
from sshg_defect.fields import HALF, M, cosh, minus, phi, plus, psi, sigma, vphi
from sshg_defect.symexpr import (
    CHIBAR, F, G, PHI, PSI, PSIBAR, VARPHI, Expr, FieldAtom, JetAtom, evaluate, fld,
    map_fields, set_zero,
)


def _at_zero(e):
    vals = {}
    for (_, form, jets, _), _c in e.terms.items():
        for fa, _q in form:
            vals[fa] = 0.0
        for a, _p in jets:
            vals[a] = 0.0
    return evaluate(e, vals, 1.3, 1.5, 0.7)


def _no_aux(region=None):
    return lambda a: a.name in (F, G) and (region is None or a.region == region)


# ---------------------------------------------------------------- type-I

def test_type1_bosonic_potential_listed_form():
    b0, b1 = D.type1_potentials(1)
    want = (M * sigma(1) * (cosh(phi(0) + phi(1)) - cosh(vphi(0) + vphi(1)))
            + M * sigma(1).inverse() * (cosh(phi(0) - phi(1)) - cosh(vphi(0) - vphi(1))))
    assert b0 == want
    assert b0.parity() == 0 and all(not k[3] for k in b0.terms)
    assert b1.parity() == 0 and all(len(k[3]) == 2 for k in b1.terms)


@pytest.mark.parametrize("k", (1, 2))
def test_type1_potential_vanishes_at_zero_fields(k):
    b0, _ = D.type1_potentials(k)
    assert _at_zero(b0) == pytest.approx(0.0, abs=1e-14)


def test_type1_rejects_bad_index():
    with pytest.raises(ValueError):
        D.build_type1(3)


def test_pair_specialises_to_single_defect():
    assert checks._type1_pair("left").is_zero()


def test_single_type1_conditions_left_convention():
    res = checks._round_trip(D.build_single_type1(), "left")
    assert checks._count(res) == 0


def test_aux_flow_condition():
    # i d_t f_k = -dB1/dg_k comes out of the g variation
    th = D.build_type1(1)
    derived = D.derive_defect_conditions(th, "left")[FieldAtom(G, 1)]
    listed = D.listed_conditions(th, "left")[FieldAtom(G, 1)]
    c = proportionality(derived, listed)
    assert c is not None and (derived - c * listed).is_zero()
    assert listed.filter(lambda k: k[3] == (JetAtom(F, 1, 1, 0),)).terms


def test_convention_is_discovered_as_left():
    assert D.discover_convention(D.build_type1(1)) == "left"
    assert checks.resolve_convention("auto") == "left"


def test_right_convention_raises_mismatch():
    with pytest.raises(D.ConventionMismatch):
        checks._type1_eom("right")
    with pytest.raises(D.ConventionMismatch):
        checks.resolve_convention("right")


def test_type1_round_trip_passes():
    r = checks.run_check("type1-eom", "left")
    assert r.status == "pass" and r.residual_terms == 0


# ---------------------------------------------------------------- type-II conditions

def test_type2_phi_minus_condition():
    th = D.build_type2()
    B = th.potentials["B0"] + th.potentials["B1"]
    listed = D.type2_listed_conditions(th)[FieldAtom(PHI, 0)]
    assert listed == minus(phi, dt=1) + D.d_even(B, phi, 0)
    rule = th.conditions.rule_for(JetAtom(PHI, 1, 1, 0))[0]
    assert rule.rhs == phi(2, dt=1) - D.d_even(B, phi, 0)


def test_type2_rules_vanish_at_zero_fields():
    th = D.build_type2()
    for rule in th.conditions.rules:
        bos = set_zero(rule.rhs, lambda a: a.odd or a.order > 0)
        assert abs(_at_zero(bos)) < 1e-14, rule.lhs


def test_type2_conditions_derive_variationally():
    assert checks._count(checks._type2_conditions("left")) == 0


def test_type2_potential_parts():
    th = D.build_type2()
    p = th.potentials
    assert all(not k[3] for k in p["B0"].terms)
    assert all(len(k[3]) == 2 for k in p["B1"].terms)
    assert p["B0"] == D.b0_plus() + D.b0_minus()


# ---------------------------------------------------------------- fusing

def test_elimination_matches_listed():
    el = D.eliminate_auxiliary_fermions()
    listed = D.listed_middle_fermions()
    for a, v in listed.items():
        assert el.solutions[a] == v, a


def test_elimination_free_midpoint():
    el = D.eliminate_auxiliary_fermions()
    free = set_zero(el.solutions[JetAtom(PSI, 0, 0, 0)], _no_aux())
    assert free == plus(psi) * HALF


def test_solutions_satisfy_both_defects_modulo_fused_conditions():
    el = D.eliminate_auxiliary_fermions()
    rs = D.fermionic_minus_rules(el.consistency)
    d1 = D.derive_defect_conditions(D.build_type1(1))
    d2 = D.derive_defect_conditions(D.build_type1(2))
    for n in D.FERMIONS:
        assert rs(el.substitute(d1[FieldAtom(n, 1)])).is_zero()
        assert rs(el.substitute(d2[FieldAtom(n, 2)])).is_zero()


def test_nonlinear_unknown_is_inconsistent():
    a = JetAtom(PSI, 0, 0, 0)
    with pytest.raises(D.InconsistentSystem):
        D._solve_unit(fld("psi", 0) * fld("phi", 1, dt=1), a)


@pytest.mark.parametrize("check_id", ["aux-elimination", "fuse-b0", "fuse-b1", "fuse-lagrangian",
                                      "fuse-bilinear", "pt-defect"])
def test_fusing_checks(check_id):
    r = checks.run_check(check_id, "left")
    assert r.status == "pass" and r.residual_terms == 0, r.notes


def test_bilinear_identities_need_factor_four():
    # [DERIVED] the listed f g part closes only after scaling by 4
    assert checks._count(D.bilinear_identity_residuals(1)) == 16
    assert checks._count(D.bilinear_identity_residuals(4)) == 0


def test_fused_b0_is_sum_of_two_n1_potentials():
    b0 = D.fuse().b0
    bp, bm = D.split_by_sigma(b0)
    assert bp == D.b0_plus() and bm == D.b0_minus()


def test_truncation_to_one_type1_defect():
    # f_2 = g_2 = 0 leaves the x=0 type-I coupling with the middle fermions at their free midpoint values
    _, b1 = D.type1_potentials(1)

    def relabel(fa):
        if fa.region == 0 and fa.name not in (PHI, VARPHI):
            return FieldAtom(fa.name, 2), (-1 if fa.name in (PSIBAR, CHIBAR) else 1)
        return None
    tp, tm = D.split_by_sigma(map_fields(b1, relabel))
    assert set_zero(D.b1_plus(), _no_aux(2)) == tp
    assert set_zero(D.b1_minus(), _no_aux(2)) == tm


def test_corrupted_fused_potential_detected():
    assert checks._count(checks._fuse_b1("left", corrupt=True)) > 0


# ---------------------------------------------------------------- Backlund

def test_backlund_count_and_parity():
    rel = D.build_backlund()
    assert len(rel) == 20
    for r in rel.values():
        assert r.residual.parity() in (0, 1), r.name
    assert checks._backlund_structure("left") == 0


def test_psi_minus_free_limit():
    r = D.build_backlund()["psi_minus"].residual
    assert set_zero(r, _no_aux()) == minus(psi)


def test_fermion_free_flows_are_b0_gradients():
    res = D.backlund_potential_residuals()
    assert all(v.is_zero() for v in res.values())
    rel = D.build_backlund()
    bos = rel["dplus_phi_minus"].rhs.filter(lambda k: not k[3])
    assert bos == -2 * D.d_plus_field(D.b0_plus(), phi)
    # the d_{phi_-} reading does not match
    assert bos != -2 * D.d_minus_field(D.b0_plus(), phi)


def test_algebraic_relations_agree_with_fused_conditions():
    assert checks._count(D.backlund_fermion_agreement()) == 0


@pytest.mark.parametrize("name", ["phi1", "psi2", "f1", "phi-minus-cross"])
def test_backlund_consistency_samples(name):
    assert D.backlund_residual(name).is_zero()


def test_backlund_bosonic_limit():
    assert checks._count(D.backlund_bosonic_limit()) == 0


def test_backlund_sign_flip_detected():
    assert not D.backlund_residual("f1", flip="dplus_f1").is_zero()


def test_unknown_backlund_check():
    with pytest.raises(KeyError):
        D.backlund_residual("zeta1")


def test_uv_functions_odd_under_field_flip():
    for k in (1, 2):
        for s in (1, -1):
            u, v = D.u_fn(k, s), D.v_fn(k, s)
            assert _flip_exp(u) == -u and _flip_exp(v) == -v


def _flip_exp(e):
    """All even fields -> minus themselves (the expressions here are pure exponentials)."""
    out = Expr()
    for (r, form, jets, word), c in e.terms.items():
        out = out + Expr({(r, tuple((fa, -q) for fa, q in form), jets, word): c}, _trusted=True)
    return out


def test_fuse_check_passes_and_reports_diff(monkeypatch):
    assert D.fuse(check=True).b0 == D.b0_plus() + D.b0_minus()
    bad = D.b1_plus() + fld("f", 1) * fld("g", 2)
    monkeypatch.setattr(D, "b1_plus", lambda: bad)
    with pytest.raises(D.ListedFormMismatch) as exc:
        D.fuse(check=True)
    assert exc.value.diff == -(fld("f", 1) * fld("g", 2))
