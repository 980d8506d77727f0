from __future__ import annotations

import json
import shutil

import pytest
from fastapi.testclient import TestClient

from studyflow.config import load_config
from studyflow.service import build_snapshot, create_app


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    # module-scoped copy so the reload test can mutate files safely
    root = tmp_path_factory.mktemp("service")
    sample = root / "sample"
    shutil.copytree("sample_data", sample)
    config = load_config(sample / "app.cfg", env={})
    app = create_app(config)
    with TestClient(app) as test_client:
        test_client.sample_dir = sample
        yield test_client


def _valid_timeline(atoms, now=0):
    return {
        "program_id": "CS",
        "regulation_version": "2018",
        "start_semester": "WS2021",
        "now": now,
        "atoms": atoms,
    }


def test_programs_endpoint(client):
    response = client.get("/api/programs")
    assert response.status_code == 200
    assert {"program_id": "CS", "regulation_version": "2018"} in response.json()
    assert response.headers["content-type"].startswith("application/json")


def test_catalog_endpoint(client):
    response = client.get("/api/programs/CS/2018/catalog")
    assert response.status_code == 200
    entries = {entry["course_id"]: entry for entry in response.json()}
    assert entries["MATH1"]["credit_points"] == 9
    assert entries["MATH1"]["offered_terms"] == "BOTH"
    assert entries["MATH1"]["mandatory"] is True
    assert entries["MATH1"]["recommended_semester"] == 1
    assert entries["SEM"]["recommended_semester"] == 3


def test_catalog_unknown_program(client):
    assert client.get("/api/programs/EE/2018/catalog").status_code == 404


def test_validate_ok_plan(client):
    payload = json.loads(
        (client.sample_dir / "timelines" / "plan-60cp.json").read_text(encoding="utf-8")
    )
    response = client.post("/api/validate", json=payload)
    assert response.status_code == 200
    report = response.json()
    assert report["violations"] == []
    assert report["trajectories"]["cp"] == [30, 51, 60]


def test_validate_reports_violations_as_data(client):
    payload = json.loads(
        (client.sample_dir / "timelines" / "plan-54cp.json").read_text(encoding="utf-8")
    )
    response = client.post("/api/validate", json=payload)
    assert response.status_code == 200
    report = response.json()
    assert len(report["violations"]) == 1
    entry = report["violations"][0]
    assert entry["rule_id"] == "R1"
    assert entry["actual"] == 54
    assert entry["required"] == 60


def test_validate_malformed_body(client):
    response = client.post(
        "/api/validate", content=b"{not json", headers={"content-type": "application/json"}
    )
    assert response.status_code == 400


def test_validate_missing_fields(client):
    response = client.post("/api/validate", json={"program_id": "CS"})
    assert response.status_code == 400
    assert "malformed timeline" in response.json()["detail"]


def test_validate_unknown_ruleset(client):
    payload = _valid_timeline([])
    payload["program_id"] = "EE"
    response = client.post("/api/validate", json=payload)
    assert response.status_code == 404


def test_validate_unknown_course(client):
    payload = _valid_timeline([{"kind": "planned_take", "course": "GHOST", "sem": 1}])
    response = client.post("/api/validate", json=payload)
    assert response.status_code == 400
    assert "GHOST" in response.json()["detail"]


def test_kpi_success_rate(client):
    response = client.get(
        "/api/kpi",
        params={"kind": "success-rate", "program": "CS", "cohort": "WS2021", "course": "PROG"},
    )
    assert response.status_code == 200
    payload = response.json()
    assert payload["numerator"] == 2
    assert payload["denominator"] == 3


def test_kpi_exams_per_semester(client):
    response = client.get(
        "/api/kpi",
        params={"kind": "exams-per-semester", "program": "CS", "cohort": "version:2018", "sem": 1},
    )
    assert response.status_code == 200
    assert set(response.json()) == {"taken", "passed"}


def test_kpi_unknown_kind(client):
    response = client.get(
        "/api/kpi", params={"kind": "nonsense", "program": "CS", "cohort": "WS2021"}
    )
    assert response.status_code == 400


def test_kpi_missing_parameter(client):
    response = client.get(
        "/api/kpi", params={"kind": "success-rate", "program": "CS", "cohort": "WS2021"}
    )
    assert response.status_code == 400


def test_kpi_unknown_program(client):
    response = client.get(
        "/api/kpi",
        params={"kind": "success-rate", "program": "EE", "cohort": "WS2021", "course": "PROG"},
    )
    assert response.status_code == 404


def test_kpi_undefined_is_422(client):
    response = client.get(
        "/api/kpi", params={"kind": "study-duration", "program": "CS", "cohort": "start:SS2022"}
    )
    assert response.status_code == 422


def test_deviations_endpoint(client):
    response = client.get(
        "/api/deviations",
        params={"program": "CS", "version": "2018", "cohort": "version:2018"},
    )
    assert response.status_code == 200
    payload = response.json()
    assert payload["aggregate"]["trace_count"] == 3
    assert payload["event_filter"] == "all"
    assert all({"course", "missing", "traces"} == set(d) for d in payload["deviations"])


def test_deviations_unknown_plan(client):
    response = client.get(
        "/api/deviations",
        params={"program": "CS", "version": "1999", "cohort": "version:2018"},
    )
    assert response.status_code == 404


def test_deviations_bad_filter(client):
    response = client.get(
        "/api/deviations",
        params={"program": "CS", "version": "2018", "cohort": "version:2018", "event_filter": "zzz"},
    )
    assert response.status_code == 400


def test_responses_use_canonical_json(client):
    response = client.get("/api/programs")
    body = response.content
    assert body.endswith(b"\n")
    parsed = json.loads(body)
    assert body == (json.dumps(parsed, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def test_reload_swaps_snapshot(client):
    sample = client.sample_dir
    plan_path = sample / "plans" / "CS-2018.json"
    original = plan_path.read_text(encoding="utf-8")
    plan = json.loads(original)
    plan["semesters"].append(["IDS"])
    plan_path.write_text(json.dumps(plan), encoding="utf-8")
    try:
        response = client.post("/api/admin/reload")
        assert response.status_code == 200
        assert response.json()["reloaded"] is True
        catalog = client.get("/api/programs/CS/2018/catalog").json()
        ids = next(e for e in catalog if e["course_id"] == "IDS")
        assert ids["recommended_semester"] == 4
    finally:
        plan_path.write_text(original, encoding="utf-8")
        client.post("/api/admin/reload")


def test_reload_failure_keeps_previous_snapshot(client):
    sample = client.sample_dir
    rules_path = sample / "rules" / "CS-2018.rules"
    original = rules_path.read_text(encoding="utf-8")
    rules_path.write_text("banana banana\n", encoding="utf-8")
    try:
        response = client.post("/api/admin/reload")
        assert response.status_code == 500
        # previous snapshot still answers
        assert client.get("/api/programs").status_code == 200
        assert client.post("/api/validate", json=_valid_timeline([])).status_code == 200
    finally:
        rules_path.write_text(original, encoding="utf-8")
        assert client.post("/api/admin/reload").status_code == 200


def test_build_snapshot_requires_filename_binding(tmp_path, sample_data_dir):
    from studyflow.rules import RuleModelError

    sample = tmp_path / "sample"
    shutil.copytree(sample_data_dir, sample)
    (sample / "rules" / "norules.rules").write_text("result cp\n", encoding="utf-8")
    config = load_config(sample / "app.cfg", env={})
    with pytest.raises(RuleModelError):
        build_snapshot(config)
