"""Mining soft precedence recommendations from historic exam records.

For each ordered course pair (X, Y) the cohort's students with at least one
attempt at Y are split by whether they passed X strictly before their first
attempt semester of Y. A large pass-rate gap between the two groups suggests
"take X first" is good advice; such pairs become default rules, never hard
requirements.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cms import CmsDatabase, CohortDef, ExamResult, cohort_enrollments, relative_semester
from .rules.model import (
    EventSpec,
    EventVerb,
    PrecedenceRequirement,
    Provenance,
    RuleCategory,
    RuleSet,
    Severity,
    Statement,
)


class MiningError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class DefaultCandidate:
    """Conditional pass-rate comparison for one ordered course pair."""

    before_course: str
    after_course: str
    support_with: int
    support_without: int
    rate_with: Fraction
    rate_without: Fraction

    @property
    def lift(self) -> Fraction:
        return self.rate_with - self.rate_without

    def to_dsl_line(self) -> str:
        return f"default pass({self.before_course}) before take({self.after_course})"

    def as_dict(self) -> dict:
        return {
            "before": self.before_course,
            "after": self.after_course,
            "support_with": self.support_with,
            "support_without": self.support_without,
            "rate_with": float(self.rate_with),
            "rate_without": float(self.rate_without),
            "lift": float(self.lift),
            "rule": self.to_dsl_line(),
        }


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def mine_precedence_defaults(
    db: CmsDatabase,
    cohort: CohortDef,
    min_support: int,
    min_lift,
) -> list[DefaultCandidate]:
    """Ranked course-pair candidates whose thresholds all hold.

    Both groups must reach ``min_support``; a rate comparison against a
    near-empty control group is noise, not evidence.
    """
    if min_support < 1:
        raise MiningError(f"min_support must be >= 1, got {min_support}")
    lift_floor = _as_fraction(min_lift)
    if not 0 < lift_floor <= 1:
        raise MiningError(f"min_lift must be in (0, 1], got {lift_floor}")

    enrollments = cohort_enrollments(db, cohort)
    if not enrollments:
        raise MiningError(f"cohort is empty: {cohort.describe()}")

    # Per student: first attempt semester and eventual outcome per course,
    # plus the semester of each pass.
    profiles = []
    for enrollment in enrollments:
        first_attempt: dict[str, int] = {}
        passed_sem: dict[str, int] = {}
        ever_passed: set[str] = set()
        for record in db.exams_for_case(enrollment.student_id, enrollment.program_id):
            if not record.counts_as_taken:
                continue
            sem = relative_semester(record, enrollment)
            course = record.course_id
            if course not in first_attempt or sem < first_attempt[course]:
                first_attempt[course] = sem
            if record.result is ExamResult.PASSED:
                ever_passed.add(course)
                if course not in passed_sem or sem < passed_sem[course]:
                    passed_sem[course] = sem
        profiles.append((first_attempt, passed_sem, ever_passed))

    courses = sorted({course for first, _, _ in profiles for course in first})
    candidates = []
    for before in courses:
        for after in courses:
            if before == after:
                continue
            with_pass = with_total = without_pass = without_total = 0
            for first_attempt, passed_sem, ever_passed in profiles:
                if after not in first_attempt:
                    continue
                prepared = before in passed_sem and passed_sem[before] < first_attempt[after]
                succeeded = after in ever_passed
                if prepared:
                    with_total += 1
                    with_pass += succeeded
                else:
                    without_total += 1
                    without_pass += succeeded
            if with_total < min_support or without_total < min_support:
                continue
            candidate = DefaultCandidate(
                before_course=before,
                after_course=after,
                support_with=with_total,
                support_without=without_total,
                rate_with=Fraction(with_pass, with_total),
                rate_without=Fraction(without_pass, without_total),
            )
            if candidate.lift >= lift_floor:
                candidates.append(candidate)

    candidates.sort(
        key=lambda c: (-c.lift, -c.support_with, c.before_course, c.after_course)
    )
    return candidates


def candidates_to_defaults(
    candidates: list[DefaultCandidate], rs: RuleSet
) -> tuple[RuleSet, list[str]]:
    """Append mined candidates as default rules; returns the grown set and notices.

    A candidate is skipped silently when the pair already has a rule, and
    dropped with a notice when a hard requirement orders the pair the other
    way around. Applying the merge twice equals applying it once.
    """
    existing_pairs = set()
    hard_pairs = set()
    for stmt in rs.statements:
        if isinstance(stmt, PrecedenceRequirement):
            pair = (stmt.before.course_id, stmt.after.course_id)
            existing_pairs.add(pair)
            if stmt.severity is Severity.VIOLATION:
                hard_pairs.add(pair)

    notices: list[str] = []
    added: list[Statement] = []
    next_id = rs.next_rule_id()
    for candidate in candidates:
        pair = (candidate.before_course, candidate.after_course)
        if pair in existing_pairs:
            continue
        if (pair[1], pair[0]) in hard_pairs:
            notices.append(
                f"dropped mined default {candidate.to_dsl_line()!r}: contradicts a "
                f"hard requirement ordering {pair[1]} before {pair[0]}"
            )
            continue
        added.append(
            PrecedenceRequirement(
                rule_id=f"R{next_id}",
                before=EventSpec(EventVerb.PASS, candidate.before_course),
                after=EventSpec(EventVerb.TAKE, candidate.after_course),
                severity=Severity.WARNING,
                category=RuleCategory.VARIANT_ADMIN,
                provenance=Provenance.MINED,
            )
        )
        existing_pairs.add(pair)
        next_id += 1
    return rs.with_statements(tuple(added)), notices
