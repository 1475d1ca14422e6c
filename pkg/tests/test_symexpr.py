import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sshg_defect.symexpr import (
    F, G, LEFT, PHI, PSI, RIGHT, CyclicRules, Expr, FieldAtom, JetAtom, NonTerminating,
    ParseError, RewriteSystem, UnknownSymbol, boson_derive, cosh, dt, dx, evaluate, exp, fld,
    grassmann_derive, normalize, parse, sinh, substitute, to_text, total_derivative,
)
from sshg_defect.symexpr.core import monomial, sort_word
from sshg_defect import defects as D
from sshg_defect import fields

from strategies import exprs, homogeneous, odd_jets

HALF = Fraction(1, 2)
psi1, psi2, chi1 = fld("psi", 1), fld("psi", 2), fld("chi", 1)
phi0, phi1, phi2 = fld("phi", 0), fld("phi", 1), fld("phi", 2)
f1, f2, g1, g2 = fld("f", 1), fld("f", 2), fld("g", 1), fld("g", 2)


# ---------------------------------------------------------------- atoms

def test_parity_lookup():
    assert [FieldAtom(n, 1).parity for n in range(8)] == [0, 0, 1, 1, 1, 1, 1, 1]


def test_aux_fermions_need_defect_region():
    with pytest.raises(ValueError):
        fld("f", 0)
    with pytest.raises(ValueError):
        fld("g", 3)


def test_odd_fields_cannot_enter_exponentials():
    with pytest.raises(ValueError):
        Expr.exp_form({FieldAtom(PSI, 1): 1})
    with pytest.raises(ValueError):
        exp(psi1)


def test_undifferentiated_boson_lives_in_exponent_only():
    # phi_1 * e^{-phi_1} is not a polynomial in phi_1: the jet is stored apart from the form
    e = exp(phi1 * HALF) * dt(phi1)
    assert len(e) == 1
    (key, c), = e.terms.items()
    assert key[1] == ((FieldAtom(PHI, 1), HALF),)
    assert key[2] == ((JetAtom(PHI, 1, 1, 0), 1),)


# ---------------------------------------------------------------- normalize / mul

def test_anticommutation():
    assert normalize([(1, [psi1, psi2]), (1, [psi2, psi1])]).is_zero()


def test_nilpotency_literal():
    assert normalize([(1, [psi1, psi1])]).is_zero()


def test_exponentials_cancel():
    assert normalize([(1, [exp(phi1), exp(-phi1)])]) == Expr.const(1)


def test_normalize_idempotent():
    e = normalize([(3, [psi2, chi1]), (Fraction(1, 2), [exp(phi1), dt(phi2)])])
    assert normalize([(1, [e])]) == e


def test_psi_chi_product_is_single_signed_monomial():
    e = psi1 * chi1
    assert len(e) == 1
    assert e == -(chi1 * psi1)


def test_four_letter_word_sign_matches_permutation_parity():
    letters = [JetAtom(F, 1, 0, 0), JetAtom(F, 2, 0, 0), JetAtom(G, 1, 0, 0), JetAtom(G, 2, 0, 0)]
    canonical = sorted(letters)
    base = Expr.jet(canonical[0]) * Expr.jet(canonical[1]) * Expr.jet(canonical[2]) * Expr.jet(canonical[3])
    assert len(base) == 1 and next(iter(base.terms.values())) == 1
    for perm in itertools.permutations(range(4)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        prod = Expr.const(1)
        for p in perm:
            prod = prod * Expr.jet(canonical[p])
        assert prod == (-1) ** inversions * base
    assert (f1 * g2) * (g1 * f2) == sort_word(
        [JetAtom(F, 1, 0, 0), JetAtom(G, 2, 0, 0), JetAtom(G, 1, 0, 0), JetAtom(F, 2, 0, 0)])[0] * base


def test_jet_does_not_enter_exponent():
    e = dt(phi1) * exp(phi1 * HALF)
    assert len(e) == 1


# ---------------------------------------------------------------- grassmann derivatives

def test_left_derivative_examples():
    a1, a2 = JetAtom(PSI, 1, 0, 0), JetAtom(PSI, 2, 0, 0)
    assert grassmann_derive(psi1 * psi2, a1, LEFT) == psi2
    assert grassmann_derive(psi1 * psi2, a2, LEFT) == -psi1


def test_right_derivative_examples():
    a1, a2 = JetAtom(PSI, 1, 0, 0), JetAtom(PSI, 2, 0, 0)
    assert grassmann_derive(psi1 * psi2, a2, RIGHT) == psi1
    assert grassmann_derive(psi1 * psi2, a1, RIGHT) == -psi2


def test_derivative_rejects_even_generator():
    with pytest.raises(ValueError):
        grassmann_derive(psi1, JetAtom(PHI, 1, 1, 0))


def _extract_left(e: Expr, g: JetAtom) -> Expr:
    """Term-by-term oracle: move g to the front of each word and strip it."""
    out = Expr()
    for (r, form, jets, word), c in e.terms.items():
        if g in word:
            p = word.index(g)
            rest = word[:p] + word[p + 1:]
            out = out + monomial((r, form, jets, rest), c * (-1) ** p)
    return out


def test_type1_potential_fermion_gradient_matches_extraction():
    _, b1 = D.type1_potentials(1)
    for atom in (JetAtom(F, 1, 0, 0), JetAtom(PSI, 1, 0, 0), JetAtom(PSI, 0, 0, 0)):
        got = grassmann_derive(b1, atom, LEFT)
        assert got == _extract_left(b1, atom)
        assert got.terms


@given(exprs(), odd_jets())
def test_left_derivative_matches_extraction_oracle(e, g):
    assert grassmann_derive(e, g, LEFT) == _extract_left(e, g)


# ---------------------------------------------------------------- boson derivatives

def test_boson_derive_exponential():
    e = exp((phi1 + phi2) * HALF)
    assert boson_derive(e, FieldAtom(PHI, 1)) == e * HALF


def test_boson_derive_cosh():
    assert boson_derive(cosh(phi0 + phi1), FieldAtom(PHI, 0)) == sinh(phi0 + phi1)


def test_boson_derive_leaves_jets_alone():
    assert boson_derive(dt(phi1) * dx(phi1), FieldAtom(PHI, 1)).is_zero()


def test_plus_derivative_chain_rule():
    b0p = D.b0_plus()
    chain = (boson_derive(b0p, FieldAtom(PHI, 1)) + boson_derive(b0p, FieldAtom(PHI, 2))) * HALF
    assert D.d_plus_field(b0p, fields.phi) == chain


# ---------------------------------------------------------------- total derivatives

def test_total_derivative_of_field():
    assert total_derivative(phi1, "t") == fld("phi", 1, dt=1)


def test_mixed_partials_commute_on_field():
    assert dx(dt(phi1)) == dt(dx(phi1))


def test_leibniz_three_terms():
    e = exp(phi0) * f1 * g2
    want = fld("phi", 0, dt=1) * e + exp(phi0) * fld("f", 1, dt=1) * g2 + exp(phi0) * f1 * fld("g", 2, dt=1)
    assert dt(e) == want
    assert len(dt(e)) == 3


def test_time_derivative_matches_finite_difference_on_trajectory():
    # even-sector instantiation along phi_0(t) = a + b t + c t^2, dx phi_1(t) = u + w t
    e = exp(phi0 * 2) * dx(phi1) ** 2 + sinh(phi0 - phi1) * dt(phi1)
    a, b, c, u, w = 0.3, -0.7, 0.2, 1.1, 0.4
    p, q, r = -0.2, 0.5, 0.9
    j = lambda n, reg, t_, x_: JetAtom(n, reg, t_, x_)

    def values(t):
        return {j(PHI, 0, 0, 0): a + b * t + c * t * t, j(PHI, 0, 1, 0): b + 2 * c * t,
                j(PHI, 1, 0, 1): u + w * t, j(PHI, 1, 1, 1): w,
                j(PHI, 1, 0, 0): p + q * t + r * t * t, j(PHI, 1, 1, 0): q + 2 * r * t,
                j(PHI, 1, 2, 0): 2 * r}
    h = 1e-5
    fd = (evaluate(e, values(h), 1.0) - evaluate(e, values(-h), 1.0)) / (2 * h)
    assert evaluate(dt(e), values(0.0), 1.0) == pytest.approx(fd, rel=1e-8)


# ---------------------------------------------------------------- substitution

def test_substitute_replaces_lhs():
    b = D.b0_plus() + D.b0_minus()
    rhs = fld("phi", 0, dt=1) - boson_derive(b, FieldAtom(PHI, 1))
    rs = RewriteSystem.from_pairs([(JetAtom(PHI, 1, 0, 1), rhs)])
    assert substitute(dx(phi1), rs) == rhs


def test_substitute_identity_without_matches():
    rs = RewriteSystem.from_pairs([(JetAtom(PHI, 1, 0, 1), fld("phi", 2, dt=1))])
    e = psi1 * dt(phi2)
    assert substitute(e, rs) == e


def test_fermionic_rules_fixpoint():
    rs = D.fermionic_minus_rules()
    once = substitute(fields.minus(fields.psi) * fields.minus(fields.chi) + fields.psi(0), rs)
    assert once.terms
    assert substitute(once, rs) == once


def test_cyclic_rules_rejected():
    a, b = JetAtom(PHI, 1, 1, 0), JetAtom(PHI, 2, 1, 0)
    with pytest.raises(CyclicRules):
        RewriteSystem.from_pairs([(a, Expr.jet(b)), (b, Expr.jet(a))])


def test_deep_chain_is_non_terminating_under_small_budget():
    chain = [JetAtom(PHI, 1, k, 0) for k in range(1, 8)]
    pairs = [(chain[k], Expr.jet(chain[k + 1])) for k in range(len(chain) - 1)]
    rs = RewriteSystem.from_pairs(pairs, max_passes=2)
    with pytest.raises(NonTerminating):
        rs(Expr.jet(chain[0]))


def test_prolonged_rule():
    rs = RewriteSystem.from_pairs([(JetAtom(PHI, 1, 0, 1), fld("phi", 2, dt=1))], prolong=("t",))
    assert rs(fld("phi", 1, dt=1, dx=1)) == fld("phi", 2, dt=2)


# ---------------------------------------------------------------- parser / printer

def test_parse_cosh():
    want = exp(phi1 + phi0) * HALF + exp(-phi1 - phi0) * HALF
    assert parse("cosh(phi[1]+phi[0])") == want


def test_parse_nilpotent():
    assert parse("psi[1]*psi[1]").is_zero()


def test_parse_half_powers():
    e = parse("sqrt(m*s1/2)*f[1]")
    (key, c), = e.terms.items()
    # m^(1/2) s1^(1/2) 2^(-1/2) = sqrt(2) m^(1/2) s1^(1/2) / 2
    assert key[0] == (0, 1, 1, 1, 0) and c == HALF


def test_parse_powers_and_nested_derivatives():
    assert parse("dt(dx(phi[1]))^2 - 1/3*dx(dt(phi[1]))*dt(dx(phi[1]))") == fld("phi", 1, 1, 1) ** 2 * Fraction(2, 3)


def test_parse_errors():
    with pytest.raises(UnknownSymbol):
        parse("zeta[1]")
    with pytest.raises(ParseError) as exc:
        parse("psi[1] * (")
    assert "position" in str(exc.value) or exc.value.offset is not None


def test_printer_deterministic():
    e = parse("cosh(phi[1]+phi[0])*psi[2]*chi[1] + 3*dt(phi[2])")
    assert to_text(e) == to_text(parse(to_text(e)))


# ---------------------------------------------------------------- properties

@settings(max_examples=200)
@given(exprs(), odd_jets())
def test_nilpotency(e, g):
    th = Expr.jet(g)
    assert (th * th * e).is_zero()


@settings(max_examples=200)
@given(st.integers(0, 1), st.integers(0, 1), st.data())
def test_supercommutativity(pa, pb, data):
    a = data.draw(homogeneous(pa))
    b = data.draw(homogeneous(pb))
    assert a * b - (-1) ** (pa * pb) * (b * a) == Expr()


@settings(max_examples=200)
@given(st.integers(0, 1), st.data(), odd_jets())
def test_graded_leibniz(pa, data, g):
    a = data.draw(homogeneous(pa))
    b = data.draw(exprs())
    lhs = grassmann_derive(a * b, g, LEFT)
    rhs = grassmann_derive(a, g, LEFT) * b + (-1) ** pa * a * grassmann_derive(b, g, LEFT)
    assert lhs == rhs


@settings(max_examples=200)
@given(exprs())
def test_total_derivatives_commute(e):
    assert dt(dx(e)) == dx(dt(e))


@given(exprs(), st.fractions(-3, 3, max_denominator=5))
def test_total_derivative_commutes_with_scalars(e, c):
    assert dt(e * c) == dt(e) * c


@settings(max_examples=1000)
@given(exprs())
def test_parse_print_round_trip(e):
    assert parse(to_text(e)) == e


@settings(max_examples=200)
@given(exprs(), exprs())
def test_exact_coefficients(a, b):
    # exact arithmetic: (a + b) - b recovers a and (a*b) keeps Fraction coefficients
    assert (a + b) - b == a
    assert all(isinstance(c, Fraction) for c in (a * b).terms.values())


@given(st.lists(odd_jets(), min_size=1, max_size=5))
def test_sort_word_sign(letters):
    res = sort_word(letters)
    if len(set(letters)) < len(letters):
        assert res is None
        return
    sign, word = res
    inv = sum(1 for i in range(len(letters)) for j in range(i + 1, len(letters)) if letters[i] > letters[j])
    assert sign == (-1) ** inv and list(word) == sorted(letters)
