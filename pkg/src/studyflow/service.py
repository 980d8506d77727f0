"""HTTP/JSON service for catalog lookup, plan validation, and dashboards.

All loaded state lives in one immutable snapshot; reload builds a fresh
snapshot off to the side and swaps a single reference, so in-flight requests
keep the data they started with. No authentication is built in: deploy this
behind institutional single sign-on, never directly on the open internet.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .cms import CmsDatabase, UnknownProgramError, cohort_from_spec
from .config import AppConfig
from .eventlog import EventFilter, LogBuildError
from .ingest import IngestionError, ingest_cms
from .jsonout import canonical_json_bytes
from .kpi import UndefinedKpiError
from .petri import RecommendedPlan, load_plan
from .reporting import KpiRequestError, conformance_log, deviations_payload, kpi_payload
from .rules.engine import UnknownTimelineCourseError, check_plan
from .rules.model import RuleModelError, RuleSet, timeline_from_dict
from .rules.parser import load_rules
from .semester import SemesterParseError


@dataclass(frozen=True)
class Snapshot:
    """Everything the service serves, loaded once and never mutated."""

    db: CmsDatabase
    rulesets: dict[tuple[str, str], RuleSet]
    plans: dict[tuple[str, str], RecommendedPlan]

    def program_pairs(self) -> list[tuple[str, str]]:
        pairs = set(self.db.programs())
        pairs.update(self.rulesets)
        pairs.update(self.plans)
        return sorted(pairs)


def build_snapshot(config: AppConfig) -> Snapshot:
    config.validate_paths()
    db = ingest_cms(config.data_dir)
    rulesets: dict[tuple[str, str], RuleSet] = {}
    for path in sorted(config.rules_dir.glob("*.rules")):
        ruleset = load_rules(path)
        if not ruleset.program_id or not ruleset.regulation_version:
            raise RuleModelError(
                f"cannot derive program and version from rules file name {path.name!r}; "
                "expected PROGRAM-VERSION.rules"
            )
        rulesets[(ruleset.program_id, ruleset.regulation_version)] = ruleset
    plans: dict[tuple[str, str], RecommendedPlan] = {}
    for path in sorted(config.plans_dir.glob("*.json")):
        plan = load_plan(path, db)
        plans[(plan.program_id, plan.regulation_version)] = plan
    return Snapshot(db=db, rulesets=rulesets, plans=plans)


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json_bytes(payload),
        status_code=status_code,
        media_type="application/json",
    )


def create_app(config: AppConfig) -> FastAPI:
    app = FastAPI(title="study planning service")
    app.state.snapshot = build_snapshot(config)
    app.state.config = config

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def snapshot() -> Snapshot:
        return app.state.snapshot

    @app.get("/api/programs")
    def list_programs() -> Response:
        pairs = snapshot().program_pairs()
        return _json_response(
            [{"program_id": pid, "regulation_version": version} for pid, version in pairs]
        )

    @app.get("/api/programs/{program_id}/{version}/catalog")
    def catalog(program_id: str, version: str) -> Response:
        snap = snapshot()
        if (program_id, version) not in snap.program_pairs():
            raise HTTPException(404, f"unknown program {program_id} {version}")
        plan = snap.plans.get((program_id, version))
        course_ids = sorted(
            {sc.course_id for sc in snap.db.scheduled_for_program(program_id)}
        )
        entries = []
        for course_id in course_ids:
            course = snap.db.courses[course_id]
            entries.append(
                {
                    "course_id": course.course_id,
                    "title": course.title,
                    "credit_points": course.credit_points,
                    "offered_terms": course.offered_terms.value,
                    "mandatory": snap.db.mandatory_in_program(course_id, program_id),
                    "recommended_semester": (
                        plan.recommended_semester(course_id) if plan else None
                    ),
                }
            )
        return _json_response(entries)

    @app.post("/api/validate")
    async def validate(request: Request) -> Response:
        snap = snapshot()
        try:
            raw = await request.json()
        except Exception as exc:
            raise HTTPException(400, f"body is not valid JSON: {exc}") from exc
        try:
            timeline = timeline_from_dict(raw)
        except (RuleModelError, SemesterParseError) as exc:
            raise HTTPException(400, str(exc)) from exc
        key = (timeline.program_id, timeline.regulation_version)
        ruleset = snap.rulesets.get(key)
        if ruleset is None:
            raise HTTPException(404, f"no rules for program {key[0]} version {key[1]}")
        try:
            report = check_plan(timeline, ruleset, snap.db)
        except UnknownTimelineCourseError as exc:
            raise HTTPException(400, str(exc)) from exc
        return _json_response(report.as_dict())

    @app.get("/api/kpi")
    def kpi(
        kind: str,
        program: str,
        cohort: str,
        course: str | None = None,
        sem: int | None = None,
        within: int | None = None,
    ) -> Response:
        snap = snapshot()
        try:
            cohort_def = cohort_from_spec(program, cohort)
            payload = kpi_payload(snap.db, kind, cohort_def, course, sem, within)
        except (KpiRequestError, SemesterParseError, ValueError) as exc:
            if isinstance(exc, UndefinedKpiError):
                raise HTTPException(422, str(exc)) from exc
            raise HTTPException(400, str(exc)) from exc
        except UnknownProgramError as exc:
            raise HTTPException(404, f"unknown program {program!r}") from exc
        except KeyError as exc:
            raise HTTPException(404, str(exc)) from exc
        return _json_response(payload)

    @app.get("/api/deviations")
    def deviations(
        program: str,
        version: str,
        cohort: str,
        event_filter: str = "all",
    ) -> Response:
        snap = snapshot()
        plan = snap.plans.get((program, version))
        if plan is None:
            raise HTTPException(404, f"no recommended plan for {program} {version}")
        try:
            mode = EventFilter(event_filter)
        except ValueError as exc:
            raise HTTPException(400, f"unknown event filter {event_filter!r}") from exc
        try:
            cohort_def = cohort_from_spec(program, cohort)
            log = conformance_log(snap.db, cohort_def)
        except (SemesterParseError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc
        except UnknownProgramError as exc:
            raise HTTPException(404, f"unknown program {program!r}") from exc
        except LogBuildError as exc:
            raise HTTPException(422, str(exc)) from exc
        return _json_response(deviations_payload(plan, log, mode))

    @app.post("/api/admin/reload")
    def reload() -> Response:
        try:
            fresh = build_snapshot(app.state.config)
        except (IngestionError, RuleModelError, ValueError) as exc:
            raise HTTPException(500, f"reload failed, keeping previous snapshot: {exc}") from exc
        app.state.snapshot = fresh
        return _json_response(
            {
                "reloaded": True,
                "programs": len(fresh.program_pairs()),
                "rulesets": len(fresh.rulesets),
                "plans": len(fresh.plans),
            }
        )

    return app
