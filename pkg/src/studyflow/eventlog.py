"""Case-centric event logs over exam records.

A case is one (student, program) enrollment; events are exam sittings. The
log builder is a pure function of the database and its configuration:
activity granularity, timestamp granularity, occurrence handling and event
filtering are all explicit knobs. Semester timestamps only induce a partial
order, so traces keep a stable ordinal as tiebreak and expose the
same-timestamp grouping directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from decimal import Decimal
from enum import Enum

from .cms import CmsDatabase, CohortDef, ExamRecord, ExamResult, cohort_enrollments
from .semester import Semester, semester_index


class ActivityMode(Enum):
    COURSE = "course"
    COURSE_AND_ATTEMPT = "course_and_attempt"


class TimestampMode(Enum):
    SEMESTER = "semester"
    EXAM_DATE = "exam_date"


class OccurrenceMode(Enum):
    FIRST_ONLY = "first_only"
    ALL = "all"


class EventFilter(Enum):
    ALL = "all"
    FIRST_ATTEMPTS = "first_attempts"
    PASSED_ONLY = "passed_only"


@dataclass(frozen=True, slots=True)
class LogConfig:
    cohort: CohortDef
    activity_mode: ActivityMode = ActivityMode.COURSE
    timestamp_mode: TimestampMode = TimestampMode.SEMESTER
    occurrence_mode: OccurrenceMode = OccurrenceMode.ALL
    event_filter: EventFilter = EventFilter.ALL
    mandatory_only: bool = False

    def describe(self) -> dict:
        return {
            "cohort": self.cohort.describe(),
            "activity_mode": self.activity_mode.value,
            "timestamp_mode": self.timestamp_mode.value,
            "occurrence_mode": self.occurrence_mode.value,
            "event_filter": self.event_filter.value,
            "mandatory_only": self.mandatory_only,
        }


class LogBuildError(ValueError):
    """Raised when the configuration cannot be satisfied by the data."""

    def __init__(self, message: str, offending: list[tuple[str, str, str, int]] | None = None):
        super().__init__(message)
        # (student, program, course, attempt) keys of records that broke the build
        self.offending = offending or []


@dataclass(frozen=True, slots=True)
class Event:
    case_id: tuple[str, str]
    activity: str
    timestamp: Semester | date
    ordinal: int
    attempt_no: int
    result: ExamResult
    grade: Decimal | None
    semester_index: int

    @property
    def attrs(self) -> dict:
        attrs = {
            "attempt_no": self.attempt_no,
            "result": self.result.value,
            "semester_index": self.semester_index,
        }
        if self.grade is not None:
            attrs["grade"] = str(self.grade)
        return attrs


@dataclass(frozen=True, slots=True)
class Trace:
    case_id: tuple[str, str]
    events: tuple[Event, ...]

    def __len__(self) -> int:
        return len(self.events)

    def activities(self) -> list[str]:
        return [event.activity for event in self.events]


@dataclass(frozen=True, slots=True)
class EventLog:
    traces: tuple[Trace, ...]
    config: LogConfig

    def __len__(self) -> int:
        return len(self.traces)

    def event_count(self) -> int:
        return sum(len(trace) for trace in self.traces)


def _timestamp_key(timestamp: Semester | date):
    return timestamp.ordinal if isinstance(timestamp, Semester) else timestamp


def build_log(db: CmsDatabase, config: LogConfig) -> EventLog:
    """Build one trace per in-scope enrollment; enrollments without events are omitted.

    The event filter applies before occurrence collapsing, so e.g. a
    fail-then-pass student under passed_only + first_only keeps the pass.
    """
    traces = []
    missing_dates: list[tuple[str, str, str, int]] = []
    for enrollment in cohort_enrollments(db, config.cohort):
        records = list(db.exams_for_case(enrollment.student_id, enrollment.program_id))
        if config.mandatory_only:
            records = [
                record
                for record in records
                if db.scheduled[(record.course_id, record.semester, record.program_id)].mandatory
            ]
        if config.event_filter is EventFilter.FIRST_ATTEMPTS:
            records = [record for record in records if record.attempt_no == 1]
        elif config.event_filter is EventFilter.PASSED_ONLY:
            records = [record for record in records if record.result is ExamResult.PASSED]

        if config.timestamp_mode is TimestampMode.EXAM_DATE:
            dateless = [record for record in records if record.exam_date is None]
            if dateless:
                missing_dates.extend(
                    (r.student_id, r.program_id, r.course_id, r.attempt_no) for r in dateless
                )
                continue

        records.sort(key=lambda r: (r.semester.ordinal, r.exam_date or date.min, r.course_id, r.attempt_no))
        if config.occurrence_mode is OccurrenceMode.FIRST_ONLY:
            seen: set[str] = set()
            first = []
            for record in records:
                if record.course_id not in seen:
                    seen.add(record.course_id)
                    first.append(record)
            records = first

        events = _to_events(records, enrollment.start_semester, config)
        if events:
            traces.append(Trace((enrollment.student_id, enrollment.program_id), tuple(events)))

    if missing_dates:
        raise LogBuildError(
            f"timestamp_mode=exam_date but {len(missing_dates)} selected record(s) have no exam date",
            offending=sorted(missing_dates),
        )
    return EventLog(tuple(traces), config)


def _to_events(records: list[ExamRecord], start: Semester, config: LogConfig) -> list[Event]:
    keyed = []
    for record in records:
        timestamp: Semester | date
        if config.timestamp_mode is TimestampMode.SEMESTER:
            timestamp = record.semester
        else:
            assert record.exam_date is not None
            timestamp = record.exam_date
        if config.activity_mode is ActivityMode.COURSE_AND_ATTEMPT:
            activity = f"{record.course_id}#{record.attempt_no}"
        else:
            activity = record.course_id
        keyed.append(((_timestamp_key(timestamp), record.course_id, record.attempt_no), timestamp, activity, record))
    keyed.sort(key=lambda item: item[0])
    return [
        Event(
            case_id=(record.student_id, record.program_id),
            activity=activity,
            timestamp=timestamp,
            ordinal=ordinal,
            attempt_no=record.attempt_no,
            result=record.result,
            grade=record.grade,
            semester_index=semester_index(record.semester, start),
        )
        for ordinal, (_, timestamp, activity, record) in enumerate(keyed)
    ]


def same_timestamp_groups(trace: Trace) -> list[list[Event]]:
    """Partition into maximal runs sharing a timestamp, in timestamp order.

    Concatenating the groups reproduces the trace exactly.
    """
    groups: list[list[Event]] = []
    current_key = object()
    for event in trace.events:
        key = _timestamp_key(event.timestamp)
        if groups and key == current_key:
            groups[-1].append(event)
        else:
            groups.append([event])
            current_key = key
    return groups


def filter_events(log: EventLog, event_filter: EventFilter) -> EventLog:
    """Re-filter an existing log; traces that become empty are dropped.

    Only filters that tighten the log are meaningful here (events removed,
    never added); used by conformance replay to switch between the
    first-attempt and success views of one log.
    """
    if event_filter is EventFilter.ALL:
        return log
    traces = []
    for trace in log.traces:
        if event_filter is EventFilter.FIRST_ATTEMPTS:
            events = tuple(event for event in trace.events if event.attempt_no == 1)
        else:
            events = tuple(event for event in trace.events if event.result is ExamResult.PASSED)
        if events:
            traces.append(Trace(trace.case_id, events))
    return EventLog(tuple(traces), log.config)
