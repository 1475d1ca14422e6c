import pytest

from sshg_defect import checks
from sshg_defect import conservation as C
from sshg_defect import defects as D
from sshg_defect.fields import I, M, cosh, minus, phi, psi, vphi
from sshg_defect.model import derived_potentials, pt_transform, with_m_zero
from sshg_defect.symexpr import (
    CHI, F, G, PHI, PSI, PSIBAR, VARPHI, JetAtom, NonTerminating, RewriteSystem, dt, set_zero,
)


@pytest.fixture(scope="module")
def basis():
    return C.default_basis()


# ---------------------------------------------------------------- basis

def test_dx_phi1_eliminated_by_defect_condition(basis):
    B = C._b("B0") + C._b("B1")
    assert basis.reduce(phi(1, dx=1)) == basis.reduce(phi(0, dt=1) - D.d_even(B, phi, 1))


def test_psi_minus_eliminated_by_fermionic_condition(basis):
    # i psi_- = -dB1/dpsi_1, so psi_1 is replaced by psi_2 plus a bilinear in the auxiliaries
    red = basis.reduce(minus(psi))
    assert red == basis.reduce(I * D.d_odd(C._b("B1"), psi, 1))
    assert all(any(a.name in (F, G) for a in k[3]) for k in red.terms)


def test_massless_basis_reduces_to_free_matching(basis):
    rule = basis.eliminated.rule_for(JetAtom(PHI, 1, 0, 1))[0]
    assert with_m_zero(rule.rhs) == phi(0, dt=1)
    rule = basis.eliminated.rule_for(JetAtom(PSI, 1, 0, 0))[0]
    assert with_m_zero(rule.rhs) == psi(2)


def test_time_jets_of_eliminated_fermions_are_generated(basis):
    red = basis.reduce(psi(1, dt=1))
    assert basis.is_reduced(red)
    assert red == basis.reduce(dt(basis.reduce(psi(1))))


def test_reduced_outputs_contain_no_eliminated_jets(basis):
    for kind in ("P", "E", "Q1", "Q1bar"):
        red = basis.reduce(dt(C.defect_term(kind)))
        assert basis.is_reduced(red), kind
        assert not [a for a in red.atoms() if a.name == PSI and a.region == 1]


def test_non_terminating_budget():
    rules = [(JetAtom(PHI, 1, k, 0), phi(1, dt=k + 1)) for k in range(1, 6)]
    rs = RewriteSystem.from_pairs(rules, max_passes=1)
    with pytest.raises(NonTerminating):
        rs(phi(1, dt=1))


# ---------------------------------------------------------------- defect terms

@pytest.mark.parametrize("kind,parity", [("P", 0), ("E", 0), ("Q1", 1), ("Q1bar", 1), ("Q2", 1), ("Q2bar", 1)])
def test_defect_term_parity(kind, parity):
    assert C.modified_charge(kind).defect_term.parity() == parity


def test_unknown_charge_kind():
    with pytest.raises(ValueError):
        C.defect_term("Q3")
    with pytest.raises(ValueError):
        C.listed_boundary_rate("Q2")


def test_momentum_defect_term_listed_form():
    p = C._theory().potentials
    assert set_zero(C.defect_term("P"), lambda a: a.odd) == p["B0plus"] - p["B0minus"]


def test_supercharge_defect_term_vanishes_without_auxiliaries():
    for kind in ("Q1", "Q1bar", "Q2", "Q2bar"):
        assert set_zero(C.defect_term(kind), lambda a: a.name in (F, G)).is_zero()


def test_pt_maps_defect_supercharges():
    assert all(v.is_zero() for v in C.pt_charge_residuals().values())


def test_pt_relabelling_symmetry_of_energy_term():
    # sigma_1 <-> sigma_2 with regions, f_1 <-> f_2, g_1 <-> -g_2 and the PT fermion signs
    e = C.defect_term("E")
    assert pt_transform(e, "defect") == e


# ---------------------------------------------------------------- relation lattice

def test_relations_hold():
    res = C.relation_residuals()
    assert len(res) == 16
    bad = [k for k, v in res.items() if not v.is_zero()]
    assert not bad


def test_b0plus_phi0_relation_example():
    e = C._b("B0plus")
    assert D.d_even(e, phi, 0) == 2 * D.d_plus_field(e, phi)


def test_relations_in_varphi_sector():
    # same relations after phi <-> varphi, with B0 entering with the opposite sign
    e = C._b("B0minus")
    assert D.d_even(e, vphi, 0) == -2 * D.d_plus_field(e, vphi)


def test_corrupted_relation_detected():
    assert checks._count(checks._relations("left", corrupt=True)) > 0


def test_bracket_identities_modulo_fused_conditions():
    res = C.bracket_residuals(modulo=True)
    assert {k: len(v) for k, v in res.items()} == {"V": 0, "W": 0, "constraint": 0}


def test_bracket_identities_fermion_free_limit():
    res = C.bracket_residuals()
    assert res["V"].is_zero()
    assert set_zero(res["W"], lambda a: a.odd).is_zero()


def test_v_difference_example():
    v1, _ = derived_potentials(1)
    assert v1 == M ** 2 * (cosh(phi(1) * 2) - cosh(vphi(1) * 2))


# ---------------------------------------------------------------- charges

@pytest.mark.slow
def test_q1_modified_charge_closes():
    assert C.charge_residual("Q1", route="listed").is_zero()


@pytest.mark.slow
def test_unmodified_flow_has_obstruction():
    assert len(C.unmodified_obstruction("Q1")) > 0


def test_independent_jets_are_basis_members(basis):
    for a in (JetAtom(PHI, 2, 1, 0), JetAtom(PHI, 0, 1, 0), JetAtom(VARPHI, 0, 1, 0),
              JetAtom(PSI, 2, 0, 0), JetAtom(PSIBAR, 2, 1, 0), JetAtom(CHI, 2, 0, 0),
              JetAtom(F, 1, 0, 0), JetAtom(G, 2, 0, 0)):
        assert basis.eliminated.rule_for(a) is None, a
    for a in (JetAtom(PHI, 1, 0, 1), JetAtom(PHI, 1, 1, 0), JetAtom(PSI, 1, 0, 0), JetAtom(F, 1, 1, 0)):
        assert basis.eliminated.rule_for(a) is not None, a
