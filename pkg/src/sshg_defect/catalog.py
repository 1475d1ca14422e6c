"""Named expressions of the theory, built lazily and cached (read-only after construction)."""
from __future__ import annotations

from functools import lru_cache
from typing import Callable

from . import conservation as C
from . import defects as D
from . import model
from .symexpr import Expr


class UnknownName(KeyError):
    pass


def _pot(name: str) -> Callable[[], Expr]:
    return lambda: C._theory().potentials[name]


_BUILDERS: dict[str, Callable[[], Expr]] = {
    "L_bulk": lambda: model.bulk_lagrangian(1).expr,
    "L_bulk1": lambda: model.bulk_lagrangian(1).expr,
    "L_bulk2": lambda: model.bulk_lagrangian(2).expr,
    "L_D": D.type2_lagrangian,
    "L_D1": lambda: D.build_type1(1).lagrangian,
    # the pair Lagrangian stores -L_{D2}; the catalog entry is L_{D2} itself
    "L_D2": lambda: -D.build_type1(2).lagrangian,
    "L_single": lambda: D.build_single_type1().lagrangian,
    "B0": _pot("B0"),
    "B1": _pot("B1"),
    "B0plus": _pot("B0plus"),
    "B0minus": _pot("B0minus"),
    "B1plus": _pot("B1plus"),
    "B1minus": _pot("B1minus"),
    "B0_1": lambda: D.type1_potentials(1)[0],
    "B1_1": lambda: D.type1_potentials(1)[1],
    "B0_2": lambda: D.type1_potentials(2)[0],
    "B1_2": lambda: D.type1_potentials(2)[1],
    "PD": lambda: C.defect_term("P"),
    "ED": lambda: C.defect_term("E"),
    "QD1": lambda: C.defect_term("Q1"),
    "QD2": lambda: C.defect_term("Q2"),
    "QbarD1": lambda: C.defect_term("Q1bar"),
    "QbarD2": lambda: C.defect_term("Q2bar"),
    "V1": lambda: model.derived_potentials(1)[0],
    "W1": lambda: model.derived_potentials(1)[1],
    "E_density": lambda: model.bulk_charge_density("E", 1).bulk_expr,
    "P_density": lambda: model.momentum_density(1),
    "Q1_density": lambda: model.q1_density(1),
    "Q1bar_density": lambda: model.q1bar_density(1),
    "Q2_density": lambda: model.q2_density(1),
    "Q2bar_density": lambda: model.q2bar_density(1),
}
for _k in (1, 2):
    for _s, _tag in ((1, "plus"), (-1, "minus")):
        _BUILDERS[f"u{_k}{_tag}"] = (lambda k, s: lambda: D.u_fn(k, s))(_k, _s)
        _BUILDERS[f"v{_k}{_tag}"] = (lambda k, s: lambda: D.v_fn(k, s))(_k, _s)

NAMES = tuple(sorted(_BUILDERS))


@lru_cache(maxsize=None)
def get(name: str) -> Expr:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownName(name) from None
    return builder()
