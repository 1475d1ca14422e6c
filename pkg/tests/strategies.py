"""Hypothesis strategies for random canonical expressions."""
from hypothesis import strategies as st

from sshg_defect.symexpr import NAMES, Expr, FieldAtom, JetAtom

ODD_NAMES = [n for n in range(len(NAMES)) if n >= 2]


@st.composite
def odd_jets(draw, max_order=1):
    name = draw(st.sampled_from(ODD_NAMES))
    region = draw(st.sampled_from((1, 2)) if NAMES[name] in ("f", "g") else st.sampled_from((0, 1, 2)))
    t = draw(st.integers(0, max_order))
    x = draw(st.integers(0, max_order - t))
    return JetAtom(name, region, t, x)


@st.composite
def even_jets(draw):
    name = draw(st.sampled_from((0, 1)))
    region = draw(st.integers(0, 2))
    t, x = draw(st.sampled_from(((1, 0), (0, 1), (1, 1), (2, 0))))
    return JetAtom(name, region, t, x)


fractions = st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool)


@st.composite
def coefficients(draw):
    c = Expr.const(draw(fractions))
    rad = Expr.radical(draw(st.integers(0, 1)), draw(st.integers(-1, 1)), draw(st.integers(-1, 2)),
                       draw(st.integers(-1, 1)), draw(st.integers(-1, 1)))
    return c * rad


@st.composite
def monomials(draw, parity=None):
    term = draw(coefficients())
    if draw(st.booleans()):
        form = {}
        for _ in range(draw(st.integers(1, 2))):
            name, region = draw(st.sampled_from((0, 1))), draw(st.integers(0, 2))
            form[(name, region)] = draw(st.fractions(-2, 2, max_denominator=4))
        term = term * Expr.exp_form({FieldAtom(*k): v for k, v in form.items()})
    for j in draw(st.lists(even_jets(), max_size=2)):
        term = term * Expr.jet(j)
    odd = draw(st.lists(odd_jets(), max_size=3))
    if parity is not None and len(odd) % 2 != parity:
        odd = odd[:-1] if odd else [draw(odd_jets())]
    for j in odd:
        term = term * Expr.jet(j)
    return term


@st.composite
def exprs(draw, parity=None, max_terms=4):
    out = Expr()
    for _ in range(draw(st.integers(0, max_terms))):
        out = out + draw(monomials(parity))
    return out


def homogeneous(parity):
    """Nonzero expressions of a fixed parity (nilpotency may kill a draw, so filter)."""
    return exprs(parity).filter(lambda e: bool(e.terms))
