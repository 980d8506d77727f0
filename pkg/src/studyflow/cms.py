"""Generic campus-management-system data model and cohort queries.

The model is deliberately minimal: students enroll in programs under a
regulation version, courses are offered per term and scheduled per semester
and program, and exam records tie the three together. Everything is
immutable once the database is built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from decimal import Decimal
from enum import Enum

from .semester import Semester, Term, semester_index


class OfferedTerms(Enum):
    WINTER_ONLY = "WS"
    SUMMER_ONLY = "SS"
    BOTH = "BOTH"

    def allows(self, term: Term) -> bool:
        if self is OfferedTerms.BOTH:
            return True
        if self is OfferedTerms.WINTER_ONLY:
            return term is Term.WINTER
        return term is Term.SUMMER


class EnrollmentStatus(Enum):
    ENROLLED = "enrolled"
    ON_LEAVE = "on_leave"
    DROPPED_OUT = "dropped_out"
    GRADUATED = "graduated"


#: Statuses that terminate an enrollment; at most one may occur, as the last entry.
TERMINAL_STATUSES = frozenset({EnrollmentStatus.DROPPED_OUT, EnrollmentStatus.GRADUATED})


class ExamResult(Enum):
    PASSED = "P"
    FAILED = "F"
    REGISTERED_NOT_TAKEN = "NT"
    DEREGISTERED = "D"


@dataclass(frozen=True, slots=True)
class OfferedCourse:
    course_id: str
    title: str
    credit_points: int
    offered_terms: OfferedTerms


@dataclass(frozen=True, slots=True)
class ScheduledCourse:
    course_id: str
    semester: Semester
    program_id: str
    mandatory: bool


@dataclass(frozen=True, slots=True)
class ProgramEnrollment:
    student_id: str
    program_id: str
    regulation_version: str
    start_semester: Semester
    # status per semester, covering a contiguous range from start_semester
    semester_statuses: tuple[tuple[Semester, EnrollmentStatus], ...]

    @property
    def semesters_studied(self) -> int:
        """Number of recorded semesters, leave included."""
        return len(self.semester_statuses)

    def final_status(self) -> EnrollmentStatus | None:
        if not self.semester_statuses:
            return None
        return self.semester_statuses[-1][1]

    def status_semester(self, status: EnrollmentStatus) -> Semester | None:
        for semester, recorded in self.semester_statuses:
            if recorded is status:
                return semester
        return None


@dataclass(frozen=True, slots=True)
class Student:
    student_id: str
    enrollments: tuple[ProgramEnrollment, ...]


@dataclass(frozen=True, slots=True)
class ExamRecord:
    student_id: str
    program_id: str
    course_id: str
    attempt_no: int
    semester: Semester
    exam_date: date | None
    registration_date: date | None
    deregistration_date: date | None
    result: ExamResult
    grade: Decimal | None

    @property
    def counts_as_taken(self) -> bool:
        """Deregistered sittings never consumed an exam slot; everything else did."""
        return self.result is not ExamResult.DEREGISTERED


@dataclass(frozen=True)
class CmsDatabase:
    """Cross-referenced, read-only view over one CSV export set.

    Collections are sorted tuples, so two ingests of the same rows compare
    equal regardless of input row order.
    """

    students: dict[str, Student]
    courses: dict[str, OfferedCourse]
    scheduled: dict[tuple[str, Semester, str], ScheduledCourse]
    exams: tuple[ExamRecord, ...]
    _exams_by_case: dict[tuple[str, str], tuple[ExamRecord, ...]] = field(
        init=False, repr=False, default_factory=dict
    )

    def __post_init__(self):
        by_case: dict[tuple[str, str], list[ExamRecord]] = {}
        for record in self.exams:
            by_case.setdefault((record.student_id, record.program_id), []).append(record)
        object.__setattr__(
            self, "_exams_by_case", {case: tuple(records) for case, records in by_case.items()}
        )

    def enrollment(self, student_id: str, program_id: str) -> ProgramEnrollment | None:
        student = self.students.get(student_id)
        if student is None:
            return None
        for enrollment in student.enrollments:
            if enrollment.program_id == program_id:
                return enrollment
        return None

    def enrollments_for_program(self, program_id: str) -> list[ProgramEnrollment]:
        found = []
        for student_id in sorted(self.students):
            for enrollment in self.students[student_id].enrollments:
                if enrollment.program_id == program_id:
                    found.append(enrollment)
        return found

    def program_ids(self) -> list[str]:
        seen = {
            enrollment.program_id
            for student in self.students.values()
            for enrollment in student.enrollments
        }
        seen.update(entry.program_id for entry in self.scheduled.values())
        return sorted(seen)

    def programs(self) -> list[tuple[str, str]]:
        """Observed (program_id, regulation_version) pairs."""
        pairs = {
            (enrollment.program_id, enrollment.regulation_version)
            for student in self.students.values()
            for enrollment in student.enrollments
        }
        return sorted(pairs)

    def exams_for_case(self, student_id: str, program_id: str) -> tuple[ExamRecord, ...]:
        return self._exams_by_case.get((student_id, program_id), ())

    def mandatory_in_program(self, course_id: str, program_id: str) -> bool:
        return any(
            entry.mandatory
            for entry in self.scheduled.values()
            if entry.course_id == course_id and entry.program_id == program_id
        )

    def scheduled_for_program(self, program_id: str) -> list[ScheduledCourse]:
        return sorted(
            (entry for entry in self.scheduled.values() if entry.program_id == program_id),
            key=lambda entry: (entry.course_id, entry.semester.ordinal),
        )


class UnknownProgramError(KeyError):
    """Raised when a cohort names a program the database has never seen."""


class CohortKind(Enum):
    START_SEMESTER = "start"
    REGULATION_VERSION = "version"
    MIN_SEMESTERS_STUDIED = "studied"


@dataclass(frozen=True, slots=True)
class CohortDef:
    """One of the three supported cohort definitions over a fixed program.

    ``value`` is a :class:`Semester` for START_SEMESTER, a version string for
    REGULATION_VERSION and an int (lower bound) for MIN_SEMESTERS_STUDIED.
    """

    program_id: str
    kind: CohortKind
    value: object

    def describe(self) -> dict:
        return {
            "program_id": self.program_id,
            "kind": self.kind.value,
            "value": str(self.value),
        }

    def matches(self, enrollment: ProgramEnrollment) -> bool:
        if enrollment.program_id != self.program_id:
            return False
        if self.kind is CohortKind.START_SEMESTER:
            return enrollment.start_semester == self.value
        if self.kind is CohortKind.REGULATION_VERSION:
            return enrollment.regulation_version == self.value
        return enrollment.semesters_studied >= int(self.value)  # type: ignore[arg-type]


def cohort_members(db: CmsDatabase, cohort: CohortDef) -> set[tuple[str, str]]:
    """(student_id, program_id) pairs whose enrollment satisfies the cohort predicate."""
    if cohort.program_id not in db.program_ids():
        raise UnknownProgramError(cohort.program_id)
    return {
        (enrollment.student_id, enrollment.program_id)
        for enrollment in db.enrollments_for_program(cohort.program_id)
        if cohort.matches(enrollment)
    }


def cohort_enrollments(db: CmsDatabase, cohort: CohortDef) -> list[ProgramEnrollment]:
    """Matching enrollments, sorted by student id for deterministic iteration."""
    if cohort.program_id not in db.program_ids():
        raise UnknownProgramError(cohort.program_id)
    return [
        enrollment
        for enrollment in db.enrollments_for_program(cohort.program_id)
        if cohort.matches(enrollment)
    ]


def relative_semester(record: ExamRecord, enrollment: ProgramEnrollment) -> int:
    """Semester index of an exam relative to the enrollment start (start = 1)."""
    return semester_index(record.semester, enrollment.start_semester)


def cohort_from_spec(program_id: str, spec: str) -> CohortDef:
    """Cohort from a compact text form.

    ``WS2021`` or ``start:WS2021`` selects a start-semester cohort,
    ``version:2018`` a regulation-version cohort and ``studied:4`` everyone
    with at least that many semesters on record.
    """
    from .semester import parse_semester

    kind_text, _, value = spec.partition(":")
    if not value:
        return CohortDef(program_id, CohortKind.START_SEMESTER, parse_semester(spec))
    if kind_text == "start":
        return CohortDef(program_id, CohortKind.START_SEMESTER, parse_semester(value))
    if kind_text == "version":
        return CohortDef(program_id, CohortKind.REGULATION_VERSION, value)
    if kind_text == "studied":
        if not value.isdigit() or int(value) < 1:
            raise ValueError(f"studied cohort needs a positive semester count, got {value!r}")
        return CohortDef(program_id, CohortKind.MIN_SEMESTERS_STUDIED, int(value))
    raise ValueError(f"unknown cohort kind {kind_text!r} in {spec!r}")
