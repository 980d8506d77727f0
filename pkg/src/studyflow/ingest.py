"""CSV ingestion into a validated :class:`~studyflow.cms.CmsDatabase`.

Expects five UTF-8, RFC-4180 CSV files in one directory::

    students.csv     student_id
    enrollments.csv  student_id,program_id,regulation_version,start_semester,semester,status
    courses.csv      course_id,title,credit_points,offered_terms   (WS|SS|BOTH)
    scheduled.csv    course_id,semester,program_id,mandatory       (0|1)
    exams.csv        student_id,program_id,course_id,attempt_no,semester,
                     exam_date,registration_date,deregistration_date,result,grade

Every problem is reported with file, line and field; ingestion either
returns a fully cross-referenced database or raises with the complete
issue list. Row order never influences the result.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import date
from decimal import Decimal, InvalidOperation
from pathlib import Path

from .cms import (
    CmsDatabase,
    EnrollmentStatus,
    ExamRecord,
    ExamResult,
    OfferedCourse,
    OfferedTerms,
    ProgramEnrollment,
    ScheduledCourse,
    Student,
    TERMINAL_STATUSES,
)
from .semester import Semester, SemesterParseError, parse_semester

FILE_NAMES = ("students.csv", "enrollments.csv", "courses.csv", "scheduled.csv", "exams.csv")

_STATUS_CODES = {status.value: status for status in EnrollmentStatus}
_RESULT_CODES = {result.value: result for result in ExamResult}


@dataclass(frozen=True, slots=True)
class IngestIssue:
    file: str
    line: int
    field: str
    message: str

    def as_dict(self) -> dict:
        return {"file": self.file, "line": self.line, "field": self.field, "message": self.message}


class IngestionError(Exception):
    def __init__(self, issues: list[IngestIssue]):
        self.issues = issues
        super().__init__(f"{len(issues)} ingestion issue(s); first: {issues[0].message}")


@dataclass(frozen=True, slots=True)
class IngestConfig:
    # German 1.0..5.0 scale: a passing exam must carry a grade <= this bound
    pass_threshold: Decimal = Decimal("4.0")


@dataclass
class _Collector:
    issues: list[IngestIssue] = field(default_factory=list)

    def add(self, file: str, line: int, field_name: str, message: str) -> None:
        self.issues.append(IngestIssue(file, line, field_name, message))


def _read_rows(path: Path, required: tuple[str, ...], collector: _Collector) -> list[tuple[int, dict]]:
    name = path.name
    if not path.is_file():
        collector.add(name, 0, "", f"missing input file: {path}")
        return []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            collector.add(name, 1, "", "empty file, header row required")
            return []
        missing = [column for column in required if column not in reader.fieldnames]
        if missing:
            collector.add(name, 1, ",".join(missing), "missing required column(s)")
            return []
        rows = []
        for row in reader:
            rows.append((reader.line_num, row))
        return rows


def _parse_semester_field(
    raw: str, file: str, line: int, field_name: str, collector: _Collector
) -> Semester | None:
    try:
        return parse_semester(raw)
    except SemesterParseError as exc:
        collector.add(file, line, field_name, str(exc))
        return None


def _parse_int_field(
    raw: str, file: str, line: int, field_name: str, collector: _Collector, minimum: int | None = None
) -> int | None:
    try:
        value = int(raw)
    except ValueError:
        collector.add(file, line, field_name, f"not an integer: {raw!r}")
        return None
    if minimum is not None and value < minimum:
        collector.add(file, line, field_name, f"must be >= {minimum}, got {value}")
        return None
    return value


def _parse_date_field(
    raw: str, file: str, line: int, field_name: str, collector: _Collector
) -> date | None:
    if raw == "":
        return None
    try:
        return date.fromisoformat(raw)
    except ValueError:
        collector.add(file, line, field_name, f"not an ISO-8601 date: {raw!r}")
        return None


def ingest_cms(data_dir: str | Path, config: IngestConfig = IngestConfig()) -> CmsDatabase:
    """Load and cross-check all five CSV files under ``data_dir``.

    Raises :class:`IngestionError` carrying every located issue when any
    check fails; otherwise the returned database satisfies all model
    invariants (re-checkable via :func:`audit_database`).
    """
    data_dir = Path(data_dir)
    collector = _Collector()

    courses = _load_courses(data_dir / "courses.csv", collector)
    student_ids = _load_students(data_dir / "students.csv", collector)
    enrollments = _load_enrollments(data_dir / "enrollments.csv", student_ids, collector)
    scheduled = _load_scheduled(data_dir / "scheduled.csv", courses, collector)
    exams = _load_exams(
        data_dir / "exams.csv", student_ids, enrollments, courses, scheduled, config, collector
    )

    if collector.issues:
        raise IngestionError(collector.issues)

    students = {
        student_id: Student(
            student_id,
            tuple(
                sorted(
                    (e for e in enrollments.values() if e.student_id == student_id),
                    key=lambda e: e.program_id,
                )
            ),
        )
        for student_id in sorted(student_ids)
    }
    return CmsDatabase(
        students=students,
        courses=dict(sorted(courses.items())),
        scheduled=dict(sorted(scheduled.items(), key=lambda kv: (kv[0][0], kv[0][1].ordinal, kv[0][2]))),
        exams=tuple(
            sorted(
                exams,
                key=lambda r: (r.student_id, r.program_id, r.course_id, r.attempt_no),
            )
        ),
    )


def _load_courses(path: Path, collector: _Collector) -> dict[str, OfferedCourse]:
    courses: dict[str, OfferedCourse] = {}
    for line, row in _read_rows(path, ("course_id", "title", "credit_points", "offered_terms"), collector):
        course_id = row["course_id"].strip()
        if not course_id:
            collector.add(path.name, line, "course_id", "empty course id")
            continue
        if course_id in courses:
            collector.add(path.name, line, "course_id", f"duplicate course id {course_id!r}")
            continue
        credit_points = _parse_int_field(
            row["credit_points"], path.name, line, "credit_points", collector, minimum=0
        )
        terms_code = row["offered_terms"].strip()
        try:
            offered_terms = OfferedTerms(terms_code)
        except ValueError:
            collector.add(path.name, line, "offered_terms", f"expected WS, SS or BOTH, got {terms_code!r}")
            continue
        if credit_points is None:
            continue
        courses[course_id] = OfferedCourse(course_id, row["title"], credit_points, offered_terms)
    return courses


def _load_students(path: Path, collector: _Collector) -> set[str]:
    student_ids: set[str] = set()
    for line, row in _read_rows(path, ("student_id",), collector):
        student_id = row["student_id"].strip()
        if not student_id:
            collector.add(path.name, line, "student_id", "empty student id")
            continue
        if student_id in student_ids:
            collector.add(path.name, line, "student_id", f"duplicate student id {student_id!r}")
            continue
        student_ids.add(student_id)
    return student_ids


def _load_enrollments(
    path: Path, student_ids: set[str], collector: _Collector
) -> dict[tuple[str, str], ProgramEnrollment]:
    name = path.name
    # (student, program) -> semester -> (line, status); plus declared version/start per row
    grouped: dict[tuple[str, str], dict[Semester, tuple[int, EnrollmentStatus]]] = {}
    declared: dict[tuple[str, str], tuple[str, Semester]] = {}
    columns = ("student_id", "program_id", "regulation_version", "start_semester", "semester", "status")
    for line, row in _read_rows(path, columns, collector):
        student_id = row["student_id"].strip()
        program_id = row["program_id"].strip()
        if student_id not in student_ids:
            collector.add(name, line, "student_id", f"unknown student {student_id!r}")
            continue
        start = _parse_semester_field(row["start_semester"], name, line, "start_semester", collector)
        semester = _parse_semester_field(row["semester"], name, line, "semester", collector)
        status_code = row["status"].strip()
        status = _STATUS_CODES.get(status_code)
        if status is None:
            collector.add(name, line, "status", f"unknown status {status_code!r}")
        if start is None or semester is None or status is None:
            continue
        key = (student_id, program_id)
        if key in declared and declared[key] != (row["regulation_version"].strip(), start):
            collector.add(
                name, line, "start_semester",
                f"conflicting regulation_version/start_semester for enrollment {key}",
            )
            continue
        declared.setdefault(key, (row["regulation_version"].strip(), start))
        statuses = grouped.setdefault(key, {})
        if semester in statuses:
            collector.add(name, line, "semester", f"duplicate status row for {key} in {semester}")
            continue
        statuses[semester] = (line, status)

    enrollments: dict[tuple[str, str], ProgramEnrollment] = {}
    for key in sorted(grouped):
        version, start = declared[key]
        statuses = grouped[key]
        ordered = sorted(statuses.items(), key=lambda item: item[0].ordinal)
        first_line = min(line for line, _ in statuses.values())
        expected = start
        contiguous = True
        for semester, _ in ordered:
            if semester != expected:
                collector.add(
                    name, first_line, "semester",
                    f"semester statuses for {key} are not contiguous from {start}: "
                    f"expected {expected}, found {semester}",
                )
                contiguous = False
                break
            expected = expected.next()
        terminal_positions = [
            position for position, (_, (_, status)) in enumerate(ordered) if status in TERMINAL_STATUSES
        ]
        if len(terminal_positions) > 1 or (
            terminal_positions and terminal_positions[0] != len(ordered) - 1
        ):
            collector.add(
                name, first_line, "status",
                f"dropped_out/graduated must appear at most once and only as final status for {key}",
            )
            continue
        if not contiguous:
            continue
        enrollments[key] = ProgramEnrollment(
            student_id=key[0],
            program_id=key[1],
            regulation_version=version,
            start_semester=start,
            semester_statuses=tuple((semester, status) for semester, (_, status) in ordered),
        )
    return enrollments


def _load_scheduled(
    path: Path, courses: dict[str, OfferedCourse], collector: _Collector
) -> dict[tuple[str, Semester, str], ScheduledCourse]:
    name = path.name
    scheduled: dict[tuple[str, Semester, str], ScheduledCourse] = {}
    for line, row in _read_rows(path, ("course_id", "semester", "program_id", "mandatory"), collector):
        course_id = row["course_id"].strip()
        program_id = row["program_id"].strip()
        semester = _parse_semester_field(row["semester"], name, line, "semester", collector)
        if semester is None:
            continue
        mandatory_raw = row["mandatory"].strip()
        if mandatory_raw not in {"0", "1"}:
            collector.add(name, line, "mandatory", f"expected 0 or 1, got {mandatory_raw!r}")
            continue
        course = courses.get(course_id)
        if course is None:
            collector.add(name, line, "course_id", f"unknown course {course_id!r}")
            continue
        if not course.offered_terms.allows(semester.term):
            collector.add(
                name, line, "semester",
                f"course {course_id!r} is offered {course.offered_terms.value} "
                f"but scheduled in {semester}",
            )
            continue
        key = (course_id, semester, program_id)
        if key in scheduled:
            collector.add(name, line, "course_id", f"duplicate schedule entry {key}")
            continue
        scheduled[key] = ScheduledCourse(course_id, semester, program_id, mandatory_raw == "1")
    return scheduled


def _load_exams(
    path: Path,
    student_ids: set[str],
    enrollments: dict[tuple[str, str], ProgramEnrollment],
    courses: dict[str, OfferedCourse],
    scheduled: dict[tuple[str, Semester, str], ScheduledCourse],
    config: IngestConfig,
    collector: _Collector,
) -> list[ExamRecord]:
    name = path.name
    columns = (
        "student_id", "program_id", "course_id", "attempt_no", "semester",
        "exam_date", "registration_date", "deregistration_date", "result", "grade",
    )
    records: list[ExamRecord] = []
    lines: dict[tuple[str, str, str, int], int] = {}
    for line, row in _read_rows(path, columns, collector):
        student_id = row["student_id"].strip()
        program_id = row["program_id"].strip()
        course_id = row["course_id"].strip()
        ok = True
        if student_id not in student_ids:
            collector.add(name, line, "student_id", f"unknown student {student_id!r}")
            ok = False
        elif (student_id, program_id) not in enrollments:
            collector.add(
                name, line, "program_id",
                f"student {student_id!r} has no enrollment in program {program_id!r}",
            )
            ok = False
        if course_id not in courses:
            collector.add(name, line, "course_id", f"unknown course {course_id!r}")
            ok = False
        attempt_no = _parse_int_field(row["attempt_no"], name, line, "attempt_no", collector, minimum=1)
        semester = _parse_semester_field(row["semester"], name, line, "semester", collector)
        exam_date = _parse_date_field(row["exam_date"], name, line, "exam_date", collector)
        registration_date = _parse_date_field(
            row["registration_date"], name, line, "registration_date", collector
        )
        deregistration_date = _parse_date_field(
            row["deregistration_date"], name, line, "deregistration_date", collector
        )
        result_code = row["result"].strip()
        result = _RESULT_CODES.get(result_code)
        if result is None:
            collector.add(name, line, "result", f"expected P, F, NT or D, got {result_code!r}")
        grade: Decimal | None = None
        if row["grade"].strip() != "":
            try:
                grade = Decimal(row["grade"].strip())
            except InvalidOperation:
                collector.add(name, line, "grade", f"not a decimal grade: {row['grade']!r}")
                ok = False
        if not ok or attempt_no is None or semester is None or result is None:
            continue
        if course_id in courses and (course_id, semester, program_id) not in scheduled:
            collector.add(
                name, line, "semester",
                f"course {course_id!r} is not scheduled for program {program_id!r} in {semester}",
            )
            continue
        if result is ExamResult.PASSED:
            if grade is None:
                collector.add(name, line, "grade", "passed exam requires a grade")
                continue
            if grade > config.pass_threshold:
                collector.add(
                    name, line, "grade",
                    f"passed exam with grade {grade} above pass threshold {config.pass_threshold}",
                )
                continue
        key = (student_id, program_id, course_id, attempt_no)
        if key in lines:
            collector.add(
                name, line, "attempt_no",
                f"duplicate exam row for {key} (first at line {lines[key]})",
            )
            continue
        lines[key] = line
        records.append(
            ExamRecord(
                student_id, program_id, course_id, attempt_no, semester,
                exam_date, registration_date, deregistration_date, result, grade,
            )
        )

    _check_attempt_sequences(records, lines, name, collector)
    return records


def _attempt_order_key(record: ExamRecord):
    return (record.semester.ordinal, record.exam_date or date.min, record.attempt_no)


def _check_attempt_sequences(
    records: list[ExamRecord],
    lines: dict[tuple[str, str, str, int], int],
    name: str,
    collector: _Collector,
) -> None:
    grouped: dict[tuple[str, str, str], list[ExamRecord]] = {}
    for record in records:
        grouped.setdefault((record.student_id, record.program_id, record.course_id), []).append(record)
    for key, group in sorted(grouped.items()):
        group.sort(key=_attempt_order_key)
        line = min(
            lines[(record.student_id, record.program_id, record.course_id, record.attempt_no)]
            for record in group
        )
        if [record.attempt_no for record in group] != list(range(1, len(group) + 1)):
            collector.add(
                name, line, "attempt_no",
                f"attempts for {key} must be 1..{len(group)} consecutive in semester/date order, "
                f"got {[record.attempt_no for record in group]}",
            )
        passed = [record for record in group if record.result is ExamResult.PASSED]
        if len(passed) > 1:
            collector.add(
                name, line, "result",
                f"more than one passed record for {key}",
            )


def audit_database(db: CmsDatabase, config: IngestConfig = IngestConfig()) -> list[IngestIssue]:
    """Re-check every model invariant on an already-built database.

    Returns an empty list exactly when the database is internally consistent;
    used as the post-ingest audit.
    """
    collector = _Collector()
    here = "<audit>"

    for course in db.courses.values():
        if course.credit_points < 0:
            collector.add(here, 0, "credit_points", f"negative credit points on {course.course_id}")
    for (course_id, semester, program_id), entry in db.scheduled.items():
        course = db.courses.get(course_id)
        if course is None:
            collector.add(here, 0, "course_id", f"scheduled entry references unknown course {course_id!r}")
        elif not course.offered_terms.allows(semester.term):
            collector.add(here, 0, "semester", f"{course_id} scheduled in incompatible term {semester}")
        if entry.program_id != program_id or entry.course_id != course_id or entry.semester != semester:
            collector.add(here, 0, "", f"scheduled index key mismatch for {(course_id, semester, program_id)}")

    for student in db.students.values():
        for enrollment in student.enrollments:
            expected = enrollment.start_semester
            for semester, _ in enrollment.semester_statuses:
                if semester != expected:
                    collector.add(
                        here, 0, "semester",
                        f"non-contiguous statuses for {(student.student_id, enrollment.program_id)}",
                    )
                    break
                expected = expected.next()
            terminal = [
                position
                for position, (_, status) in enumerate(enrollment.semester_statuses)
                if status in TERMINAL_STATUSES
            ]
            if len(terminal) > 1 or (
                terminal and terminal[0] != len(enrollment.semester_statuses) - 1
            ):
                collector.add(
                    here, 0, "status",
                    f"terminal status not unique/final for {(student.student_id, enrollment.program_id)}",
                )

    grouped: dict[tuple[str, str, str], list[ExamRecord]] = {}
    for record in db.exams:
        if db.students.get(record.student_id) is None:
            collector.add(here, 0, "student_id", f"exam references unknown student {record.student_id!r}")
            continue
        if db.enrollment(record.student_id, record.program_id) is None:
            collector.add(here, 0, "program_id", f"exam references missing enrollment {record.student_id!r}")
        if record.course_id not in db.courses:
            collector.add(here, 0, "course_id", f"exam references unknown course {record.course_id!r}")
        if (record.course_id, record.semester, record.program_id) not in db.scheduled:
            collector.add(here, 0, "semester", f"exam references unscheduled course {record.course_id!r}")
        if record.result is ExamResult.PASSED:
            if record.grade is None or record.grade > config.pass_threshold:
                collector.add(here, 0, "grade", f"passed exam with bad grade for {record.student_id!r}")
        grouped.setdefault((record.student_id, record.program_id, record.course_id), []).append(record)
    for key, group in grouped.items():
        group.sort(key=_attempt_order_key)
        if [record.attempt_no for record in group] != list(range(1, len(group) + 1)):
            collector.add(here, 0, "attempt_no", f"attempt numbering broken for {key}")
        if sum(1 for record in group if record.result is ExamResult.PASSED) > 1:
            collector.add(here, 0, "result", f"multiple passes for {key}")

    return collector.issues
