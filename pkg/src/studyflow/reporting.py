"""Operations shared by the CLI and the HTTP service.

Both front ends must produce identical payloads for the same question, so
the payload assembly lives here and each front end only handles transport.
"""

from __future__ import annotations

from .cms import CmsDatabase, CohortDef
from .eventlog import EventFilter, EventLog, LogConfig, OccurrenceMode, build_log
from .kpi import (
    avg_attempts,
    avg_study_duration,
    dropout_rate,
    exams_per_semester,
    success_rate,
)
from .petri import RecommendedPlan, deviation_summary, plan_to_petri, replay_log

KPI_KINDS = (
    "success-rate",
    "avg-attempts",
    "exams-per-semester",
    "study-duration",
    "dropout-rate",
)


class KpiRequestError(ValueError):
    """The KPI request itself is malformed (unknown kind, missing parameter)."""


def kpi_payload(
    db: CmsDatabase,
    kind: str,
    cohort: CohortDef,
    course: str | None = None,
    sem: int | None = None,
    within: int | None = None,
) -> dict:
    if kind == "success-rate":
        if course is None:
            raise KpiRequestError("success-rate needs a course")
        return success_rate(db, course, cohort).as_dict()
    if kind == "avg-attempts":
        if course is None:
            raise KpiRequestError("avg-attempts needs a course")
        return avg_attempts(db, course, cohort).as_dict()
    if kind == "exams-per-semester":
        if sem is None:
            raise KpiRequestError("exams-per-semester needs a semester index")
        taken, passed = exams_per_semester(db, cohort, sem)
        return {"taken": taken.as_dict(), "passed": passed.as_dict()}
    if kind == "study-duration":
        return avg_study_duration(db, cohort).as_dict()
    if kind == "dropout-rate":
        if within is None:
            raise KpiRequestError("dropout-rate needs a semester horizon")
        return dropout_rate(db, cohort, within).as_dict()
    raise KpiRequestError(f"unknown KPI kind {kind!r}; expected one of {', '.join(KPI_KINDS)}")


def conformance_log(db: CmsDatabase, cohort: CohortDef) -> EventLog:
    """Replay traces carry each course once, at its first occurrence."""
    return build_log(db, LogConfig(cohort=cohort, occurrence_mode=OccurrenceMode.FIRST_ONLY))


def deviations_payload(
    plan: RecommendedPlan, log: EventLog, mode: EventFilter = EventFilter.ALL
) -> dict:
    net = plan_to_petri(plan)
    results, aggregate = replay_log(net, log, mode)
    ranked = deviation_summary(results)
    return {
        "plan": plan.as_dict(),
        "event_filter": mode.value,
        "aggregate": aggregate.as_dict(),
        "deviations": [
            {"course": course, "missing": missing, "traces": traces}
            for course, missing, traces in ranked
        ],
    }
