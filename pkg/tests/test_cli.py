from __future__ import annotations

import json
import shutil
import subprocess
import xml.etree.ElementTree as ET

import pytest
from fastapi.testclient import TestClient

from studyflow.cli import main
from studyflow.config import load_config
from studyflow.service import create_app


@pytest.fixture()
def run(capsysbinary):
    def _run(*argv):
        code = main(list(argv))
        captured = capsysbinary.readouterr()
        return code, captured.out, captured.err

    return _run


@pytest.fixture(scope="module")
def http(sample_data_dir):
    config = load_config(sample_data_dir / "app.cfg", env={})
    with TestClient(create_app(config)) as client:
        yield client


def test_ingest_check_ok(run, sample_data_dir):
    code, out, _ = run("ingest-check", "--data", str(sample_data_dir / "data"))
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True
    assert payload["students"] == 3
    assert payload["exams"] == 12
    assert payload["programs"] == [{"program_id": "CS", "regulation_version": "2018"}]


def test_ingest_check_reports_issues(run, sample_data_dir, tmp_path):
    broken = tmp_path / "broken"
    shutil.copytree(sample_data_dir / "data", broken)
    with (broken / "enrollments.csv").open("a", encoding="utf-8") as handle:
        handle.write("GHOST,CS,2018,WS2021,WS2021,enrolled\n")
    code, out, _ = run("ingest-check", "--data", str(broken))
    assert code == 1
    payload = json.loads(out)
    assert payload["ok"] is False
    assert any("GHOST" in issue["message"] for issue in payload["issues"])
    assert all({"file", "line", "field", "message"} == set(i) for i in payload["issues"])


def test_build_log_writes_xes(run, sample_data_dir, tmp_path):
    out_path = tmp_path / "log.xes"
    code, out, _ = run(
        "build-log",
        "--data", str(sample_data_dir / "data"),
        "--program", "CS",
        "--cohort", "WS2021",
        "--out", str(out_path),
    )
    assert code == 0
    payload = json.loads(out)
    assert payload == {"out": str(out_path), "traces": 3, "events": 12}
    root = ET.parse(out_path).getroot()
    assert root.tag.endswith("log")


def test_kpi_success_rate(run, sample_data_dir):
    code, out, _ = run(
        "kpi",
        "--data", str(sample_data_dir / "data"),
        "--program", "CS",
        "--cohort", "WS2021",
        "--kind", "success-rate",
        "--course", "PROG",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["numerator"] == 2
    assert payload["denominator"] == 3


def test_kpi_undefined_exits_one(run, sample_data_dir):
    code, out, err = run(
        "kpi",
        "--data", str(sample_data_dir / "data"),
        "--program", "CS",
        "--cohort", "WS2021",
        "--kind", "success-rate",
        "--course", "IDS",
    )
    assert code == 1
    assert out == b""
    assert b"error:" in err


def test_kpi_missing_course_exits_one(run, sample_data_dir):
    code, _, err = run(
        "kpi",
        "--data", str(sample_data_dir / "data"),
        "--program", "CS",
        "--cohort", "WS2021",
        "--kind", "success-rate",
    )
    assert code == 1
    assert b"needs a course" in err


def test_kpi_unknown_kind_is_usage_error(run, sample_data_dir):
    with pytest.raises(SystemExit) as excinfo:
        run(
            "kpi",
            "--data", str(sample_data_dir / "data"),
            "--program", "CS",
            "--cohort", "WS2021",
            "--kind", "velocity",
        )
    assert excinfo.value.code == 2


def test_dfg_writes_dot(run, sample_data_dir, tmp_path):
    out_path = tmp_path / "graph.dot"
    code, out, _ = run(
        "dfg",
        "--data", str(sample_data_dir / "data"),
        "--program", "CS",
        "--cohort", "version:2018",
        "--out", str(out_path),
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["traces"] == 3
    assert payload["nodes"] > 0
    text = out_path.read_text(encoding="utf-8")
    assert text.startswith("digraph dfg {")


def test_conform_with_side_outputs(run, sample_data_dir, tmp_path):
    pnml_path = tmp_path / "plan.pnml"
    dot_path = tmp_path / "plan.dot"
    code, out, _ = run(
        "conform",
        "--data", str(sample_data_dir / "data"),
        "--program", "CS",
        "--cohort", "version:2018",
        "--plan", str(sample_data_dir / "plans" / "CS-2018.json"),
        "--pnml", str(pnml_path),
        "--dot", str(dot_path),
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["aggregate"]["trace_count"] == 3
    assert ET.parse(pnml_path).getroot().tag.endswith("pnml")
    assert dot_path.read_text(encoding="utf-8").startswith("digraph petrinet {")


def test_validate_clean_plan(run, sample_data_dir):
    code, out, _ = run(
        "validate",
        "--timeline", str(sample_data_dir / "timelines" / "plan-60cp.json"),
        "--rules-dir", str(sample_data_dir / "rules"),
        "--data", str(sample_data_dir / "data"),
        "--strict",
    )
    assert code == 0
    assert json.loads(out)["violations"] == []


def test_validate_strict_exits_one_on_violations(run, sample_data_dir):
    code, out, _ = run(
        "validate",
        "--timeline", str(sample_data_dir / "timelines" / "plan-54cp.json"),
        "--rules-dir", str(sample_data_dir / "rules"),
        "--strict",
    )
    assert code == 1
    payload = json.loads(out)
    assert payload["violations"][0]["actual"] == 54


def test_validate_without_strict_exits_zero(run, sample_data_dir):
    code, out, _ = run(
        "validate",
        "--timeline", str(sample_data_dir / "timelines" / "plan-54cp.json"),
        "--rules-dir", str(sample_data_dir / "rules"),
    )
    assert code == 0
    assert json.loads(out)["violations"]


def test_validate_explicit_rules_file(run, sample_data_dir):
    code, out, _ = run(
        "validate",
        "--timeline", str(sample_data_dir / "timelines" / "plan-60cp.json"),
        "--rules", str(sample_data_dir / "rules" / "CS-2018.rules"),
    )
    assert code == 0
    assert json.loads(out)["violations"] == []


def test_validate_missing_binding_is_usage_error(run, sample_data_dir, tmp_path):
    code, out, err = run(
        "validate",
        "--timeline", str(sample_data_dir / "timelines" / "plan-60cp.json"),
        "--rules-dir", str(tmp_path),
    )
    assert code == 2
    assert out == b""
    assert b"no rules file" in err


def test_validate_missing_timeline_is_usage_error(run, tmp_path):
    code, _, err = run(
        "validate",
        "--timeline", str(tmp_path / "missing.json"),
        "--rules-dir", str(tmp_path),
    )
    assert code == 2
    assert b"error:" in err


def test_validate_audit_flags_seminar_order(run, sample_data_dir):
    code, out, _ = run(
        "validate",
        "--timeline", str(sample_data_dir / "timelines" / "seminar-too-early.json"),
        "--rules-dir", str(sample_data_dir / "rules"),
        "--audit",
    )
    assert code == 0
    payload = json.loads(out)
    assert any(v["rule_id"] == "R2" for v in payload["violations"])
    entry = next(v for v in payload["violations"] if v["rule_id"] == "R2")
    assert entry["message"] == "pass(PROSEM) must come before take(SEM)"


def test_mine_lists_candidates(run, miner30_dir):
    code, out, _ = run(
        "mine",
        "--data", str(miner30_dir),
        "--program", "DS",
        "--cohort", "version:2020",
        "--min-support", "5",
        "--min-lift", "0.2",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["candidates"]
    top = payload["candidates"][0]
    assert (top["before"], top["after"]) == ("STAT", "IDS")


def test_mine_merges_into_rules(run, miner30_dir, tmp_path):
    base_rules = tmp_path / "DS-2020.rules"
    base_rules.write_text("result cp\n", encoding="utf-8")
    out_rules = tmp_path / "merged.rules"
    code, out, _ = run(
        "mine",
        "--data", str(miner30_dir),
        "--program", "DS",
        "--cohort", "version:2020",
        "--min-support", "5",
        "--min-lift", "0.2",
        "--rules", str(base_rules),
        "--out-rules", str(out_rules),
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["merged_out"] == str(out_rules)
    text = out_rules.read_text(encoding="utf-8")
    assert "default pass(STAT) before take(IDS)" in text
    from studyflow.rules.parser import load_rules

    merged = load_rules(out_rules, program_id="DS", regulation_version="2020")
    assert len(merged.statements) > 1


def test_mine_requires_paired_merge_flags(run, miner30_dir):
    with pytest.raises(SystemExit) as excinfo:
        run(
            "mine",
            "--data", str(miner30_dir),
            "--program", "DS",
            "--cohort", "version:2020",
            "--min-support", "5",
            "--min-lift", "0.2",
            "--rules", "somefile.rules",
        )
    assert excinfo.value.code == 2


def test_serve_missing_config_is_usage_error(run, tmp_path):
    code, _, err = run("serve", "--config", str(tmp_path / "nope.cfg"))
    assert code == 2
    assert b"error:" in err


def test_validate_cli_matches_http_bytes(run, http, sample_data_dir):
    timeline_path = sample_data_dir / "timelines" / "plan-60cp.json"
    code, cli_bytes, _ = run(
        "validate",
        "--timeline", str(timeline_path),
        "--rules-dir", str(sample_data_dir / "rules"),
        "--data", str(sample_data_dir / "data"),
    )
    assert code == 0
    response = http.post(
        "/api/validate", json=json.loads(timeline_path.read_text(encoding="utf-8"))
    )
    assert response.status_code == 200
    assert cli_bytes == response.content


def test_kpi_cli_matches_http_bytes(run, http, sample_data_dir):
    code, cli_bytes, _ = run(
        "kpi",
        "--data", str(sample_data_dir / "data"),
        "--program", "CS",
        "--cohort", "WS2021",
        "--kind", "success-rate",
        "--course", "PROG",
    )
    assert code == 0
    response = http.get(
        "/api/kpi",
        params={"kind": "success-rate", "program": "CS", "cohort": "WS2021", "course": "PROG"},
    )
    assert cli_bytes == response.content


def test_conform_cli_matches_http_bytes(run, http, sample_data_dir, tmp_path):
    code, cli_bytes, _ = run(
        "conform",
        "--data", str(sample_data_dir / "data"),
        "--program", "CS",
        "--cohort", "version:2018",
        "--plan", str(sample_data_dir / "plans" / "CS-2018.json"),
    )
    assert code == 0
    response = http.get(
        "/api/deviations",
        params={"program": "CS", "version": "2018", "cohort": "version:2018"},
    )
    assert cli_bytes == response.content


def test_console_script_entry_point(sample_data_dir):
    if shutil.which("studyflow") is None:
        pytest.skip("console script not installed")
    completed = subprocess.run(
        ["studyflow", "ingest-check", "--data", str(sample_data_dir / "data")],
        capture_output=True,
    )
    assert completed.returncode == 0
    assert json.loads(completed.stdout)["ok"] is True
