import json

import pytest

from mil import __version__
from mil.cli import main
from mil.report import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    ClaimResult,
    Outcome,
    ScenarioReport,
    combine,
    dsp_witness,
    recheck_report,
    recheck_witness,
    render_json,
    render_text,
    run_claim,
    validate,
)
from mil.decide import dsp_decide
from mil.different import different
from mil.families import gu3_stabilizers
from mil.invariants import BudgetExceeded
from mil.scenarios import SCENARIOS, Scenario, run_scenario


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list(capsys):
    code, out, _ = run_cli(capsys, "list", "--report", "json")
    assert code == 0
    rows = json.loads(out)
    assert [r["name"] for r in rows] == list(SCENARIOS)
    assert all(r["anchor"] and r["locator"] for r in rows)
    code, out, _ = run_cli(capsys, "list")
    assert code == 0 and "example-gu3" in out and "anchor:" in out


def test_run_json_is_schema_valid_and_deterministic(capsys):
    code, a, _ = run_cli(capsys, "run", "example-abelian-ii", "--report", "json", "--recheck")
    assert code == 0
    doc = json.loads(a)
    validate(doc)
    assert doc["status"] == PASS and doc["version"] == __version__
    assert "timings" not in doc
    assert all(c.get("recheck") in (None, PASS) for c in doc["claims"])
    code, b, _ = run_cli(capsys, "run", "example-abelian-ii", "--report", "json", "--recheck")
    assert a == b


def test_run_with_timings(capsys):
    code, out, _ = run_cli(capsys, "run", "family-III-b", "--report", "json", "--timings")
    doc = json.loads(out)
    validate(doc)
    assert set(doc["timings"]) == {"total", "claims"}


def test_run_all_wrapper(capsys, tmp_path):
    target = tmp_path / "all.json"
    code, out, _ = run_cli(capsys, "run", "family-III-a", "--report", "json", "-o", str(target))
    assert code == 0 and out == ""
    validate(json.loads(target.read_text()))
    reports = [run_scenario("family-III-a"), run_scenario("family-III-b")]
    doc = json.loads(render_json(reports, __version__))
    validate(doc)
    assert doc["scenario"] == "all" and len(doc["reports"]) == 2


def test_text_report(capsys):
    code, out, _ = run_cli(capsys, "run", "family-II")
    assert code == 0
    assert out.startswith("== family-II [PASS]")


def test_usage_errors(capsys):
    assert run_cli(capsys, "run", "no-such-scenario")[0] == 64
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["run", "example-gu3", "--q", "two"])
    assert exc.value.code == 64
    assert run_cli(capsys, "group", "bogus:q=2")[0] == 64


def test_inconclusive_exit_code(capsys):
    code, out, _ = run_cli(capsys, "run", "example-gu3", "--budget", "5", "--report", "json")
    assert code == 3
    doc = json.loads(out)
    validate(doc)
    assert doc["status"] == INCONCLUSIVE


def test_failing_exit_code(capsys, monkeypatch):
    def runner(ctx):
        ctx.claim("always-false", "none", "a claim that fails", lambda: Outcome(False, {"x": 1}))

    sc = Scenario("failing", "nowhere", "nothing", "deliberately failing", {}, runner)
    monkeypatch.setitem(SCENARIOS, "failing", sc)
    code, out, _ = run_cli(capsys, "run", "failing", "--report", "json")
    assert code == 2
    assert json.loads(out)["status"] == FAIL


def test_cap_env_makes_run_inconclusive(capsys, monkeypatch):
    monkeypatch.setenv("MIL_CAP", "4")
    code, out, _ = run_cli(capsys, "run", "family-II", "--report", "json")
    assert code == 3


def test_group_describe(capsys):
    code, out, _ = run_cli(capsys, "group", "gu3:q=2:sub=Htilde", "--describe")
    assert code == 0
    d = json.loads(out)
    assert d["order"] == 8 and d["n"] == 3 and d["field"]["modulus"] == [1, 1, 1]
    code, out, _ = run_cli(capsys, "group", "s3")
    assert "order=6" in out


def test_combine_and_run_claim():
    assert combine([PASS, PASS]) == PASS
    assert combine([PASS, INCONCLUSIVE]) == INCONCLUSIVE
    assert combine([INCONCLUSIVE, FAIL]) == FAIL

    def boom():
        raise BudgetExceeded("too big")

    def bad():
        raise AssertionError("wrong")

    assert run_claim("a", "op", "e", boom).status == INCONCLUSIVE
    assert run_claim("b", "op", "e", bad).status == FAIL
    assert run_claim("c", "op", "e", lambda: Outcome(None)).status == INCONCLUSIVE


def test_recheck_detects_tampering():
    G = gu3_stabilizers(2).H
    data = different(G)
    v = dsp_decide(G, data)
    w = dsp_witness(G, data.theta, v.witness)
    assert recheck_witness(w)
    bad = dict(w, witness=w["theta"])
    assert not recheck_witness(bad)
    claim = ClaimResult("dsp", "dsp_decide", "holds", PASS, {}, [bad], [])
    rep = ScenarioReport("x", "loc", "anchor", {}, 0, [claim], [], __version__)
    recheck_report(rep)
    assert claim.recheck == FAIL and rep.status == FAIL
    assert "recheck" in render_text([rep])
