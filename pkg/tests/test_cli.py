import json

import pytest

from sshg_defect import catalog, checks, cli
from sshg_defect import defects as D
from sshg_defect.fields import I
from sshg_defect.symexpr import fld, parse


def _verify(capsys, *argv):
    code = cli.main(["verify", *argv])
    out = capsys.readouterr()
    return code, json.loads(out.out) if out.out.strip() else None, out.err


# ---------------------------------------------------------------- registry

SPEC_IDS = ["momentum", "energy", "q1", "q1bar", "q2", "q2bar", "relations", "brackets", "pt-charges",
            "type1-eom", "fuse-b0", "fuse-b1", "aux-elimination", "type2-conditions", "pt-defect"]


def test_registry_has_required_checks():
    assert set(SPEC_IDS) <= set(checks.CHECKS)
    assert len(checks.select("backlund-*")) >= 20
    assert sum(c.negative for c in checks.CHECKS.values()) >= 5


def test_select_globs():
    assert checks.select("none-matching") == []
    assert checks.select("q1,q1bar") == ["q1", "q1bar"]
    assert checks.select(None) == sorted(checks.CHECKS)


# ---------------------------------------------------------------- verify

def test_verify_empty_selection(capsys):
    code, reports, _ = _verify(capsys, "--filter", "none-matching")
    assert code == 0 and reports == []


def test_verify_right_convention_mismatch(capsys):
    code, reports, err = _verify(capsys, "--filter", "type1-eom", "--convention", "right")
    assert code == 2
    assert "ConventionMismatch" in err
    assert any("ConventionMismatch" in r["notes"] for r in reports)


def test_verify_backlund_family(capsys):
    code, reports, _ = _verify(capsys, "--filter", "backlund-*")
    assert code == 0
    assert len(reports) >= 20
    assert all(r["status"] == "pass" and r["residual_terms"] == 0 and r["convention"] == "left" for r in reports)
    assert [r["check_id"] for r in reports] == sorted(r["check_id"] for r in reports)


def test_verify_report_schema_and_determinism(capsys, tmp_path):
    outs = []
    for workers in ("1", "2"):
        path = tmp_path / f"r{workers}.json"
        code = cli.main(["verify", "--filter", "fuse-b0,pt-defect,negative-eom", "--workers", workers,
                         "--out", str(path)])
        capsys.readouterr()
        assert code == 0
        reports = json.loads(path.read_text())
        assert all(list(r) == ["check_id", "status", "residual_terms", "convention", "elapsed_ms", "notes"]
                   for r in reports)
        for r in reports:
            r.pop("elapsed_ms")
        outs.append(reports)
    assert outs[0] == outs[1]


def test_verify_failure_exit_code(capsys, monkeypatch):
    bad = checks.Check("fuse-b0", lambda side: [parse("phi[1]")])
    monkeypatch.setitem(checks.CHECKS, "fuse-b0", bad)
    code, reports, err = _verify(capsys, "--filter", "fuse-b0", "--workers", "1")
    assert code == 2 and reports[0]["status"] == "fail" and reports[0]["residual_terms"] == 1
    assert "fuse-b0" in err


def test_verify_internal_error_exit_code(capsys, monkeypatch):
    def boom(side):
        raise RuntimeError("broken check")
    monkeypatch.setitem(checks.CHECKS, "fuse-b0", checks.Check("fuse-b0", boom))
    code, _, err = _verify(capsys, "--filter", "fuse-b0", "--workers", "1")
    assert code == 3 and "broken check" in err


# ---------------------------------------------------------------- simulate

def _sim(capsys, tmp_path, text):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    out = tmp_path / "out"
    code = cli.main(["simulate", str(cfg), "--out", str(out)])
    cap = capsys.readouterr()
    return code, out, cap


def test_simulate_vacuum(capsys, tmp_path):
    code, out, cap = _sim(capsys, tmp_path, "L = 2\ndx = 0.05\ndt = 0.02\nt_end = 1\noutput_every = 10\n")
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary == json.loads(cap.out)
    assert summary["max_E_drift"] == 0 and summary["max_P_drift"] == 0
    lines = (out / "timeseries.csv").read_text().splitlines()
    assert lines[0].split(",") == ["t", "E_bulk", "E_defect", "E_total", "P_bulk", "P_defect", "P_total", "residual"]
    assert all(float(v) == 0 for row in lines[1:] for v in row.split(",")[1:])


def test_simulate_malformed_config(capsys, tmp_path):
    code, _, cap = _sim(capsys, tmp_path, "dx = 0.05\nthis is not a config\n")
    assert code == 1 and "line 2" in cap.err


def test_simulate_missing_config(capsys, tmp_path):
    assert cli.main(["simulate", str(tmp_path / "absent.cfg"), "--out", str(tmp_path)]) == 1


def test_simulate_blowup_exit_code(capsys, tmp_path):
    code, _, cap = _sim(capsys, tmp_path, "L = 2\ndx = 0.05\ndt = 0.02\nt_end = 1\noutput_every = 1\n"
                                          "ic = gaussian amplitude=400 width=0.3 center=-1\n")
    assert code == 2 and "blowup" in cap.err


def test_simulate_packet_reports_transmission(capsys, tmp_path):
    # coarse and short: the full-tolerance run is in the acceptance suite
    code, _, cap = _sim(capsys, tmp_path, "L = 20\ndx = 0.02\ndt = 0.008\nt_end = 24\noutput_every = 50\n"
                                          "ic = packet k=2 amplitude=1e-3 width=2 center=-8\n")
    assert code == 0
    summary = json.loads(cap.out)
    assert abs(summary["measured_T"] - summary["oracle_T"]) < 1e-2


# ---------------------------------------------------------------- dump

def _dump(capsys, *argv):
    code = cli.main(["dump", *argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_dump_b0plus_exponential_form(capsys):
    code, text, _ = _dump(capsys, "B0plus")
    assert code == 0
    e = parse(text)
    assert e == D.b0_plus()
    assert all(form and not jets for (_, form, jets, _) in e.terms)


def test_dump_qd1(capsys):
    code, text, _ = _dump(capsys, "QD1")
    want = sum((-I * parse(f"sqrt(2*m*s{k})") * (D.u_fn(k, 1) * fld("f", k) + D.u_fn(k, -1) * fld("g", k))
                for k in (1, 2)), start=parse("0"))
    assert code == 0 and parse(text) == want


@pytest.mark.parametrize("name", catalog.NAMES)
def test_dump_round_trip(capsys, name):
    code, text, _ = _dump(capsys, name, "--check")
    assert code == 0 and parse(text) == catalog.get(name)


def test_dump_unknown_name(capsys):
    code, _, err = _dump(capsys, "Bogus")
    assert code == 1 and "UnknownName" in err


def test_dump_list(capsys):
    code, text, _ = _dump(capsys, "--list")
    assert code == 0 and tuple(text.split()) == catalog.NAMES


def test_dump_is_deterministic(capsys):
    assert _dump(capsys, "L_D") == _dump(capsys, "L_D")
