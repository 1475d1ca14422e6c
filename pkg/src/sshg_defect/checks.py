"""Registry of symbolic verification checks and the Report they produce.

Every check returns residual expressions; a check passes when all of them are
the zero Expr.  Negative controls corrupt one sign on purpose and pass when the
corruption is detected (nonzero residual).
"""
from __future__ import annotations

import fnmatch
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

from . import conservation as C
from . import defects as D
from . import model
from .fields import HALF, M, phi, plus, sinh, vphi
from .symexpr import F, G, NAMES, Expr, FieldAtom, map_fields, set_zero

log = logging.getLogger(__name__)

WORKERS_ENV = "SSHG_WORKERS"


@dataclass
class Report:
    check_id: str
    status: str
    residual_terms: int
    convention: str
    elapsed_ms: int
    notes: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Check:
    check_id: str
    fn: Callable
    negative: bool = False
    notes: str = ""


def _count(res) -> int:
    if isinstance(res, Expr):
        return len(res)
    if isinstance(res, dict):
        return sum(_count(v) for v in res.values())
    if isinstance(res, (list, tuple)):
        return sum(_count(v) for v in res)
    return int(res)


def _match(a: Expr, b: Expr) -> Expr:
    """a - c*b for the constant c fixed by one monomial (a itself if none matches)."""
    c = model.proportionality(a, b)
    if c is not None:
        return a - c * b
    return a if a.terms else b


# ---------------------------------------------------------------- model

def _bulk_lagrangian(side):
    L = model.bulk_lagrangian(1).expr
    limit = set_zero(L, lambda a: a.odd)
    expected = (HALF * phi(1, dx=1) ** 2 - HALF * phi(1, dt=1) ** 2
                - HALF * vphi(1, dx=1) ** 2 + HALF * vphi(1, dt=1) ** 2
                + model.bosonic_potential(1))
    return {"text": L - model.bulk_lagrangian_text(1).expr, "bosonic": limit - expected,
            "m0": model.with_m_zero(model.bosonic_potential(1) + model.yukawa_terms(1))}


def _eom_constants():
    L = model.bulk_lagrangian(1)
    ref = model.bulk_eom_reference(1)
    out = {}
    for n in model.FIELD_NAMES:
        el = model.euler_lagrange(L, FieldAtom(NAMES.index(n), 1))
        out[n] = (el, ref[n], model.proportionality(el, ref[n]))
    return out


def _bulk_eom(side, corrupt=False):
    res = {}
    consts = _eom_constants()
    for n, (el, ref, _) in consts.items():
        if corrupt and n == "phi":
            ref = ref + 4 * M ** 2 * sinh(phi(1) * 2)
        res[n] = _match(el, ref)
    return res


def _susy_identity(side):
    return {"full": model.susy_identity_residual(1),
            "m0": model.susy_identity_residual(1, m_zero=True)}


def _susy_eom(side):
    rs = model.bulk_eom_rewrite((1,))
    ref = model.bulk_eom_reference(1)
    d = model.delta1((1,))
    return {n: rs(model.susy_vary(ref[n], d)) for n in model.FIELD_NAMES}


def _bulk_pt(side):
    L = model.bulk_lagrangian(1).expr
    return {"L": model.pt_transform(L) - L,
            "Q": model.pt_transform(model.q1_density(1)) - model.q2_density(1),
            "Qbar": model.pt_transform(model.q1bar_density(1)) - model.q2bar_density(1)}


def _bulk_charge(kind):
    def run(side):
        c = model.bulk_charge_density(kind, 1)
        return model.bulk_eom_rewrite((1,))(model.dt(c.bulk_expr) - model.dx(c.flux))
    return run


# ---------------------------------------------------------------- defects

def _round_trip(th, side):
    derived = D.derive_defect_conditions(th, side)
    listed = D.listed_conditions(th, side)
    return {str(fa): _match(derived[fa], listed[fa]) for fa in listed}


def _type1_eom(side):
    out = {}
    for th in (D.build_single_type1(), D.build_type1(1), D.build_type1(2)):
        res = _round_trip(th, side)
        out[th.kind] = res
    if _count(out):
        raise D.ConventionMismatch(f"{side} convention leaves {_count(out)} residual terms in the type-I conditions")
    return out


def _type1_pair(side):
    e = D.build_type1(1).lagrangian
    mapped = map_fields(e, lambda fa: (FieldAtom(fa.name, 2), 1) if fa.region == 0 else None)
    return mapped - D.build_single_type1().lagrangian


def _aux_elimination(side):
    el = D.eliminate_auxiliary_fermions(side)
    listed = D.listed_middle_fermions()
    out = {str(a): el.solutions[a] - listed[a] for a in listed}
    for a, v in el.solutions.items():
        free = set_zero(v, lambda x: x.name in (F, G))
        out[f"free {a}"] = free - (plus(D._MIDDLE[a.name]) * HALF * (1 if a.name in (D.PSI, D.CHI) else -1))
    return out


def _fuse_b0(side):
    b0 = D.fuse(side).b0
    bp, bm = D.split_by_sigma(b0)
    return {"B0": b0 - D.b0_plus() - D.b0_minus(), "B0plus": bp - D.b0_plus(), "B0minus": bm - D.b0_minus()}


def _fuse_b1(side, corrupt=False):
    bp, bm = D.split_by_sigma(D.fuse(side).b1)
    listed = D.b1_plus()
    if corrupt:
        fg = listed.filter(lambda k: any(a.name == F and a.region == 1 for a in k[3])
                           and any(a.name == G and a.region == 2 for a in k[3]))
        listed = listed - 2 * fg
    return {"B1plus": bp - listed, "B1minus": bm - D.b1_minus()}


def _fuse_lagrangian(side):
    return D.fuse(side).lagrangian - D.type2_lagrangian()


def _fuse_bilinear(side):
    return D.bilinear_identity_residuals(4)


def _type2_conditions(side):
    return _round_trip(D.build_type2(), side)


def _pt_defect(side):
    L = D.type2_lagrangian()
    return model.pt_transform(L, "defect") - L


def _backlund(name, flip=None):
    return lambda side: D.backlund_residual(name, flip)


def _backlund_structure(side):
    rel = D.build_backlund()
    bad = 0 if len(rel) == 20 else 1
    for r in rel.values():
        parities = {len(k[3]) & 1 for k in r.residual.terms}
        bad += len(parities) > 1
    return bad


# ---------------------------------------------------------------- conservation

def _charge(kind, route):
    def run(side):
        out = {route: C.charge_residual(kind, route=route)}
        if route == "listed":
            out["routes-agree"] = C.rate_agreement(kind)
        return out
    return run


def _relations(side, corrupt=False):
    out = C.relation_residuals()
    if corrupt:
        e = C._b("B0plus")
        out["corrupted"] = D.d_even(e, phi, 0) + 2 * D.d_plus_field(e, phi)
    return out


def _pt_charges(side):
    return C.pt_charge_residuals()


# ---------------------------------------------------------------- negative controls

def _neg_susy(side):
    return model.susy_identity_residual(1, model.variation_brackets(1, flip="dx_bracket"))


def _neg_convention(side):
    other = "right" if side == "left" else "left"
    return _round_trip(D.build_type1(1), other)


def _neg_backlund(side):
    return D.backlund_residual("f1", flip="dplus_f1")


def _neg_obstruction(side):
    return C.unmodified_obstruction("Q1")


def _neg_energy(side):
    return C.charge_residual("E", route="listed", with_defect=False)


_NOTES = {
    "bulk-eom": "constants -1, +1 (phi, varphi) and -2i, +2i, +2i, -2i (psi, psibar, chi, chibar)",
    "susy-identity": "chi piece of the t-bracket taken with the sign that closes the identity",
    "fuse-bilinear": "closes with the listed f g part scaled by 4",
    "brackets": "W identity holds modulo the fused fermionic conditions",
    "q1": "Q1 boundary display read with the symmetric 2i chi_2 d+ varphi_2 term",
    "type1-eom": "single, x=0 and x=x0 type-I defects",
}


def _registry() -> dict:
    checks = [
        Check("bulk-lagrangian", _bulk_lagrangian),
        Check("bulk-eom", _bulk_eom),
        Check("susy-identity", _susy_identity),
        Check("susy-eom", _susy_eom),
        Check("bulk-pt", _bulk_pt),
    ]
    checks += [Check(f"bulk-charge-{k.lower()}", _bulk_charge(k)) for k in model.CHARGE_KINDS]
    checks += [
        Check("type1-eom", _type1_eom),
        Check("type1-pair", _type1_pair),
        Check("aux-elimination", _aux_elimination),
        Check("fuse-b0", _fuse_b0),
        Check("fuse-b1", _fuse_b1),
        Check("fuse-lagrangian", _fuse_lagrangian),
        Check("fuse-bilinear", _fuse_bilinear),
        Check("type2-conditions", _type2_conditions),
        Check("pt-defect", _pt_defect),
    ]
    checks += [Check(f"backlund-{n}", _backlund(n)) for n in D.BACKLUND_CHECKS]
    checks += [
        Check("backlund-structure", _backlund_structure),
        Check("backlund-potential", lambda side: D.backlund_potential_residuals()),
        Check("backlund-fermions", lambda side: D.backlund_fermion_agreement()),
        Check("backlund-bosonic-limit", lambda side: D.backlund_bosonic_limit()),
        Check("momentum", _charge("P", "listed")),
        Check("energy", _charge("E", "listed")),
        Check("q1", _charge("Q1", "listed")),
        Check("q1bar", _charge("Q1bar", "derived")),
        Check("q2", _charge("Q2", "derived")),
        Check("q2bar", _charge("Q2bar", "derived")),
        Check("relations", _relations),
        Check("brackets", lambda side: C.bracket_residuals(modulo=True)),
        Check("pt-charges", _pt_charges),
        Check("negative-eom", lambda side: _bulk_eom(side, corrupt=True), negative=True),
        Check("negative-susy", _neg_susy, negative=True),
        Check("negative-convention", _neg_convention, negative=True),
        Check("negative-fuse", lambda side: _fuse_b1(side, corrupt=True), negative=True),
        Check("negative-backlund", _neg_backlund, negative=True),
        Check("negative-relations", lambda side: _relations(side, corrupt=True), negative=True),
        Check("negative-charge", _neg_obstruction, negative=True),
        Check("negative-energy", _neg_energy, negative=True),
    ]
    return {c.check_id: Check(c.check_id, c.fn, c.negative, _NOTES.get(c.check_id, "")) for c in checks}


CHECKS = _registry()

# checks whose result depends on the Grassmann derivative side
CONVENTION_SENSITIVE = ("type1-eom", "type2-conditions", "aux-elimination", "fuse-b0", "fuse-b1",
                        "fuse-lagrangian")


def select(pattern: str | None) -> list:
    ids = sorted(CHECKS)
    if not pattern:
        return ids
    pats = [p.strip() for p in pattern.split(",") if p.strip()]
    return [i for i in ids if any(fnmatch.fnmatchcase(i, p) for p in pats)]


def run_check(check_id: str, convention: str = "left") -> Report:
    chk = CHECKS[check_id]
    t0 = time.perf_counter()
    notes = chk.notes
    try:
        res = chk.fn(convention)
        n = _count(res)
        if chk.negative:
            status = "pass" if n else "fail"
            notes = f"corruption detected, {n} residual terms" if n else "corruption not detected"
            n = 0 if n else 1
        else:
            status = "pass" if n == 0 else "fail"
    except D.ConventionMismatch as exc:
        status, n, notes = "fail", 1, f"ConventionMismatch: {exc}"
    ms = int(round((time.perf_counter() - t0) * 1000))
    log.debug("%s %s (%d ms)", check_id, status, ms)
    return Report(check_id, status, n, convention, ms, notes)


def resolve_convention(requested: str = "auto") -> str:
    """Lock the derivative convention: ``auto`` discovers it on the type-I round trip,
    an explicit choice is validated against the same round trip."""
    if requested == "auto":
        return D.discover_convention(D.build_type1(1))
    if requested not in ("left", "right"):
        raise ValueError(f"convention must be auto, left or right, got {requested!r}")
    res = _round_trip(D.build_type1(1), requested)
    if _count(res):
        raise D.ConventionMismatch(
            f"the {requested} convention does not reproduce the type-I defect conditions "
            f"({_count(res)} residual terms)")
    return requested


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        return max(1, int(raw))
    return max(1, min(8, os.cpu_count() or 1))


def _worker(args):
    return run_check(*args)


def run_checks(ids, convention: str = "left", workers: int | None = None) -> list:
    """Run the given checks (in a process pool when workers > 1); reports sorted by id."""
    ids = sorted(ids)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(ids) <= 1:
        reports = [run_check(i, convention) for i in ids]
    else:
        # heaviest checks first so the pool drains evenly
        order = sorted(ids, key=lambda i: (i not in _HEAVY, i))
        with ProcessPoolExecutor(max_workers=min(workers, len(ids))) as ex:
            reports = list(ex.map(_worker, [(i, convention) for i in order]))
    return sorted(reports, key=lambda r: r.check_id)


_HEAVY = {"momentum", "energy", "q1", "q1bar", "q2", "q2bar", "brackets", "susy-identity",
          "negative-energy", "negative-charge"}
