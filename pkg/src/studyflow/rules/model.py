"""Regulation rule model: accumulators, requirements, defaults, timelines.

A ruleset is an ordered list of statements, because statement order fixes
rule ids and the canonical text layout. Requirements come in two severities:
hard ones ("require") yield violations, soft ones ("default") yield warnings
and never block a plan.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Union

from ..cms import OfferedTerms
from ..semester import Semester, parse_semester


class RuleModelError(ValueError):
    pass


class AtomKind(Enum):
    PASSED = "passed"
    FAILED = "failed"
    REGISTERED = "registered"
    DEREGISTERED = "deregistered"
    PLANNED_TAKE = "planned_take"


class EventVerb(Enum):
    """Event patterns the rule language can talk about."""

    PASS = "pass"
    FAIL = "fail"
    TAKE = "take"
    REGISTER = "register"


#: Which timeline atom kinds each verb matches. Planned courses are assumed
#: to succeed, so "pass" patterns match them too (optimistic planning).
VERB_MATCHES: dict[EventVerb, frozenset[AtomKind]] = {
    EventVerb.PASS: frozenset({AtomKind.PASSED, AtomKind.PLANNED_TAKE}),
    EventVerb.FAIL: frozenset({AtomKind.FAILED}),
    EventVerb.TAKE: frozenset(
        {AtomKind.REGISTERED, AtomKind.PASSED, AtomKind.FAILED, AtomKind.PLANNED_TAKE}
    ),
    EventVerb.REGISTER: frozenset({AtomKind.REGISTERED, AtomKind.PLANNED_TAKE}),
}


class RuleCategory(Enum):
    INVARIANT = "invariant"
    VARIANT_ADMIN = "variant_admin"
    VARIANT_STUDENT = "variant_student"


class Severity(Enum):
    VIOLATION = "violation"
    WARNING = "warning"


class Provenance(Enum):
    AUTHORED = "authored"
    MINED = "mined"


class Comparator(Enum):
    LT = "<"
    LE = "<="
    EQ = "="
    GE = ">="
    GT = ">"

    def holds(self, actual: int, bound: int) -> bool:
        if self is Comparator.LT:
            return actual < bound
        if self is Comparator.LE:
            return actual <= bound
        if self is Comparator.EQ:
            return actual == bound
        if self is Comparator.GE:
            return actual >= bound
        return actual > bound


@dataclass(frozen=True, slots=True)
class EventSpec:
    """A verb applied to one course, e.g. pass(MATH1)."""

    verb: EventVerb
    course_id: str

    def matches(self, atom: "EventAtom") -> bool:
        return atom.course_id == self.course_id and atom.kind in VERB_MATCHES[self.verb]

    def __str__(self) -> str:
        return f"{self.verb.value}({self.course_id})"


@dataclass(frozen=True, slots=True)
class EventAtom:
    """One recorded or planned study event at a relative semester index."""

    kind: AtomKind
    course_id: str
    sem: int

    def __post_init__(self):
        if self.sem < 1:
            raise RuleModelError(f"semester index must be >= 1, got {self.sem}")

    def as_dict(self) -> dict:
        return {"kind": self.kind.value, "course": self.course_id, "sem": self.sem}


@dataclass(frozen=True, slots=True)
class Timeline:
    """A student's past record plus planned courses, in relative semesters.

    ``now`` is the last completed semester index: everything at or before it
    is history, everything after it is plan. ``start_semester`` anchors
    relative indices to calendar terms for availability checks.
    """

    program_id: str
    regulation_version: str
    start_semester: Semester
    now: int
    atoms: tuple[EventAtom, ...]

    def __post_init__(self):
        if self.now < 0:
            raise RuleModelError(f"now must be >= 0, got {self.now}")
        planned_seen: set[tuple[str, int]] = set()
        for atom in self.atoms:
            if atom.kind is AtomKind.PLANNED_TAKE:
                if atom.sem <= self.now:
                    raise RuleModelError(
                        f"planned_take {atom.course_id} at semester {atom.sem} "
                        f"is not after now={self.now}"
                    )
                key = (atom.course_id, atom.sem)
                if key in planned_seen:
                    raise RuleModelError(
                        f"duplicate planned_take for {atom.course_id} in semester {atom.sem}"
                    )
                planned_seen.add(key)
            elif atom.sem > self.now:
                raise RuleModelError(
                    f"{atom.kind.value} {atom.course_id} at semester {atom.sem} "
                    f"lies after now={self.now}"
                )

    def courses(self) -> set[str]:
        return {atom.course_id for atom in self.atoms}

    def absolute_semester(self, sem: int) -> Semester:
        return self.start_semester.advance(sem - 1)

    def as_dict(self) -> dict:
        return {
            "program_id": self.program_id,
            "regulation_version": self.regulation_version,
            "start_semester": str(self.start_semester),
            "now": self.now,
            "atoms": [atom.as_dict() for atom in self.atoms],
        }


def timeline_from_dict(raw: dict) -> Timeline:
    """Build a Timeline from its JSON exchange form, with field checks."""
    try:
        atoms = []
        for entry in raw["atoms"]:
            atoms.append(
                EventAtom(
                    kind=AtomKind(entry["kind"]),
                    course_id=str(entry["course"]),
                    sem=int(entry["sem"]),
                )
            )
        return Timeline(
            program_id=str(raw["program_id"]),
            regulation_version=str(raw["regulation_version"]),
            start_semester=parse_semester(str(raw["start_semester"])),
            now=int(raw["now"]),
            atoms=tuple(atoms),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, RuleModelError):
            raise
        raise RuleModelError(f"malformed timeline: {exc}") from exc


def load_timeline(source: str | Path) -> Timeline:
    return timeline_from_dict(json.loads(Path(source).read_text(encoding="utf-8")))


@dataclass(frozen=True, slots=True)
class ResultDecl:
    name: str
    category: RuleCategory


@dataclass(frozen=True, slots=True)
class Contribution:
    """An event pattern feeding units into a named result accumulator."""

    trigger: EventSpec
    result_name: str
    delta: int
    category: RuleCategory

    def __post_init__(self):
        if self.delta < 0:
            raise RuleModelError(f"contribution delta must be >= 0, got {self.delta}")


@dataclass(frozen=True, slots=True)
class ResultRequirement:
    """Bound on an accumulated result, due by a deadline or inside a window.

    The deadline form sums every matching event up to the deadline; the
    window form sums only events inside [window_from, window_to] and is
    checked at the window's end.
    """

    rule_id: str
    result_name: str
    comparator: Comparator
    bound: int
    deadline: int | None
    window: tuple[int, int] | None
    severity: Severity
    category: RuleCategory
    filter_courses: frozenset[str] | None = None
    provenance: Provenance = field(default=Provenance.AUTHORED, compare=False)

    def __post_init__(self):
        if (self.deadline is None) == (self.window is None):
            raise RuleModelError("exactly one of deadline or window is required")
        if self.deadline is not None and self.deadline < 1:
            raise RuleModelError(f"deadline must be >= 1, got {self.deadline}")
        if self.window is not None:
            low, high = self.window
            if low < 1 or high < low:
                raise RuleModelError(f"bad semester window {low}..{high}")
        if self.bound < 0:
            raise RuleModelError(f"bound must be >= 0, got {self.bound}")

    @property
    def checked_at(self) -> int:
        return self.deadline if self.deadline is not None else self.window[1]

    def in_scope(self, sem: int) -> bool:
        if self.deadline is not None:
            return sem <= self.deadline
        low, high = self.window
        return low <= sem <= high


@dataclass(frozen=True, slots=True)
class PrecedenceRequirement:
    """An ordering constraint: the before event must precede the after event."""

    rule_id: str
    before: EventSpec
    after: EventSpec
    severity: Severity
    category: RuleCategory
    provenance: Provenance = field(default=Provenance.AUTHORED, compare=False)

    def __post_init__(self):
        if self.before == self.after:
            raise RuleModelError(f"precedence rule relates {self.before} to itself")


@dataclass(frozen=True, slots=True)
class AvailabilityRule:
    """Term restriction for one course, overriding the catalog when present."""

    rule_id: str
    course_id: str
    offered_terms: OfferedTerms
    category: RuleCategory


Requirement = Union[ResultRequirement, PrecedenceRequirement]
Statement = Union[ResultDecl, Contribution, ResultRequirement, PrecedenceRequirement, AvailabilityRule]

#: Category assumed before any explicit "category" line appears.
DEFAULT_CATEGORY = RuleCategory.INVARIANT


@dataclass(frozen=True)
class RuleSet:
    """Parsed regulation rules for one program and regulation version.

    ``statements`` preserves source order; the typed views below are what
    the evaluation engine consumes.
    """

    program_id: str | None
    regulation_version: str | None
    statements: tuple[Statement, ...]

    def __post_init__(self):
        declared = set()
        for stmt in self.statements:
            if isinstance(stmt, ResultDecl):
                if stmt.name in declared:
                    raise RuleModelError(f"result {stmt.name!r} declared twice")
                declared.add(stmt.name)
        for stmt in self.statements:
            if isinstance(stmt, Contribution) and stmt.result_name not in declared:
                raise RuleModelError(
                    f"contribution references undeclared result {stmt.result_name!r}"
                )
            if isinstance(stmt, ResultRequirement) and stmt.result_name not in declared:
                raise RuleModelError(
                    f"requirement references undeclared result {stmt.result_name!r}"
                )

    @property
    def result_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.statements if isinstance(s, ResultDecl))

    @property
    def contributions(self) -> tuple[Contribution, ...]:
        return tuple(s for s in self.statements if isinstance(s, Contribution))

    @property
    def requirements(self) -> tuple[Requirement, ...]:
        return tuple(
            s
            for s in self.statements
            if isinstance(s, (ResultRequirement, PrecedenceRequirement))
            and s.severity is Severity.VIOLATION
        )

    @property
    def defaults(self) -> tuple[Requirement, ...]:
        return tuple(
            s
            for s in self.statements
            if isinstance(s, (ResultRequirement, PrecedenceRequirement))
            and s.severity is Severity.WARNING
        )

    @property
    def availability(self) -> dict[str, AvailabilityRule]:
        return {s.course_id: s for s in self.statements if isinstance(s, AvailabilityRule)}

    def courses_mentioned(self) -> set[str]:
        mentioned: set[str] = set()
        for stmt in self.statements:
            if isinstance(stmt, Contribution):
                mentioned.add(stmt.trigger.course_id)
            elif isinstance(stmt, ResultRequirement) and stmt.filter_courses:
                mentioned.update(stmt.filter_courses)
            elif isinstance(stmt, PrecedenceRequirement):
                mentioned.add(stmt.before.course_id)
                mentioned.add(stmt.after.course_id)
            elif isinstance(stmt, AvailabilityRule):
                mentioned.add(stmt.course_id)
        return mentioned

    def with_statements(self, extra: tuple[Statement, ...]) -> "RuleSet":
        return RuleSet(self.program_id, self.regulation_version, self.statements + extra)

    def next_rule_id(self) -> int:
        highest = 0
        for stmt in self.statements:
            rid = getattr(stmt, "rule_id", None)
            if rid and rid.startswith("R") and rid[1:].isdigit():
                highest = max(highest, int(rid[1:]))
        return highest + 1


@dataclass(frozen=True, slots=True)
class ReportEntry:
    """One violation or warning, anchored to a rule and a semester."""

    rule_id: str
    semester: int
    courses: tuple[str, ...]
    message: str
    actual: int | None
    required: int | None

    def as_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "semester": self.semester,
            "courses": list(self.courses),
            "message": self.message,
            "actual": self.actual,
            "required": self.required,
        }


@dataclass(frozen=True, slots=True)
class ValidationReport:
    violations: tuple[ReportEntry, ...]
    warnings: tuple[ReportEntry, ...]
    trajectories: dict[str, tuple[int, ...]]

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "violations": [entry.as_dict() for entry in self.violations],
            "warnings": [entry.as_dict() for entry in self.warnings],
            "trajectories": {name: list(values) for name, values in self.trajectories.items()},
        }
