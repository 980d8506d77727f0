"""Standard cohort KPIs over the CMS database.

All ratio/mean KPIs are computed in exact rational arithmetic; the
numerator and denominator stay visible on the result so dashboards can show
the counts next to the rate. A KPI over an empty basis is an error, never a
silent zero: "0%" and "no data" must stay distinguishable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cms import (
    CmsDatabase,
    CohortDef,
    EnrollmentStatus,
    ExamResult,
    cohort_enrollments,
)
from .semester import Semester, semester_index


class UndefinedKpiError(ValueError):
    """The KPI has no basis (empty denominator), which is distinct from value 0."""


@dataclass(frozen=True, slots=True)
class KpiValue:
    name: str
    value: Fraction
    numerator: int
    denominator: int
    cohort: CohortDef
    filters: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": float(self.value),
            "numerator": self.numerator,
            "denominator": self.denominator,
            "cohort": self.cohort.describe(),
            "filters": dict(self.filters),
        }


def _kpi(name: str, numerator: int, denominator: int, cohort: CohortDef, **filters) -> KpiValue:
    if denominator <= 0:
        raise UndefinedKpiError(f"{name}: no data in cohort {cohort.describe()}")
    return KpiValue(
        name=name,
        value=Fraction(numerator, denominator),
        numerator=numerator,
        denominator=denominator,
        cohort=cohort,
        filters={key: value for key, value in filters.items() if value is not None},
    )


def success_rate(
    db: CmsDatabase, course_id: str, cohort: CohortDef, semester: Semester | None = None
) -> KpiValue:
    """Students who passed the course / students with any exam record for it."""
    if course_id not in db.courses:
        raise KeyError(f"unknown course {course_id!r}")
    attempted = 0
    passed = 0
    for enrollment in cohort_enrollments(db, cohort):
        records = [
            record
            for record in db.exams_for_case(enrollment.student_id, enrollment.program_id)
            if record.course_id == course_id and (semester is None or record.semester == semester)
        ]
        if not records:
            continue
        attempted += 1
        if any(record.result is ExamResult.PASSED for record in records):
            passed += 1
    return _kpi(
        "success_rate", passed, attempted, cohort,
        course=course_id, semester=str(semester) if semester else None,
    )


def avg_attempts(db: CmsDatabase, course_id: str, cohort: CohortDef) -> KpiValue:
    """Mean over attempting students of their highest attempt number for the course."""
    if course_id not in db.courses:
        raise KeyError(f"unknown course {course_id!r}")
    maxima = []
    for enrollment in cohort_enrollments(db, cohort):
        attempts = [
            record.attempt_no
            for record in db.exams_for_case(enrollment.student_id, enrollment.program_id)
            if record.course_id == course_id
        ]
        if attempts:
            maxima.append(max(attempts))
    return _kpi("avg_attempts", sum(maxima), len(maxima), cohort, course=course_id)


def exams_per_semester(
    db: CmsDatabase, cohort: CohortDef, sem_index: int
) -> tuple[KpiValue, KpiValue]:
    """(avg taken, avg passed) in the given relative semester, over the whole cohort.

    "Taken" excludes deregistrations but includes no-shows, which still
    consumed a registration slot.
    """
    enrollments = cohort_enrollments(db, cohort)
    if not enrollments:
        raise UndefinedKpiError(f"exams_per_semester: empty cohort {cohort.describe()}")
    taken = 0
    passed = 0
    for enrollment in enrollments:
        for record in db.exams_for_case(enrollment.student_id, enrollment.program_id):
            if semester_index(record.semester, enrollment.start_semester) != sem_index:
                continue
            if record.counts_as_taken:
                taken += 1
            if record.result is ExamResult.PASSED:
                passed += 1
    count = len(enrollments)
    return (
        _kpi("exams_taken_per_semester", taken, count, cohort, semester_index=sem_index),
        _kpi("exams_passed_per_semester", passed, count, cohort, semester_index=sem_index),
    )


def avg_study_duration(db: CmsDatabase, cohort: CohortDef) -> KpiValue:
    """Mean semester count from start to graduation, over graduated enrollments only."""
    durations = []
    for enrollment in cohort_enrollments(db, cohort):
        graduated = enrollment.status_semester(EnrollmentStatus.GRADUATED)
        if graduated is not None:
            durations.append(semester_index(graduated, enrollment.start_semester))
    return _kpi("avg_study_duration", sum(durations), len(durations), cohort)


def dropout_rate(db: CmsDatabase, cohort: CohortDef, within_semesters: int) -> KpiValue:
    """Fraction of the cohort whose dropout falls within the first ``within_semesters``."""
    enrollments = cohort_enrollments(db, cohort)
    dropped = 0
    for enrollment in enrollments:
        dropout = enrollment.status_semester(EnrollmentStatus.DROPPED_OUT)
        if dropout is not None and semester_index(dropout, enrollment.start_semester) <= within_semesters:
            dropped += 1
    return _kpi(
        "dropout_rate", dropped, len(enrollments), cohort, within_semesters=within_semesters
    )
