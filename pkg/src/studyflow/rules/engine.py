"""Timeline validation against a ruleset.

Two modes share one evaluator. Planning mode treats everything at or before
``now`` as immutable fact: facts feed the accumulators but are never checked,
so an inconsistent history produces zero violations. Audit mode drops that
exemption and checks the full record, which is how granted exceptions in
historic data become visible.
"""

from __future__ import annotations

from ..cms import CmsDatabase
from .model import (
    AtomKind,
    PrecedenceRequirement,
    ReportEntry,
    Requirement,
    ResultRequirement,
    RuleSet,
    Timeline,
    ValidationReport,
)

#: Atom kinds that occupy a teaching slot and therefore need the course offered.
_NEEDS_OFFERING = frozenset(
    {AtomKind.REGISTERED, AtomKind.PASSED, AtomKind.FAILED, AtomKind.PLANNED_TAKE}
)


class UnknownTimelineCourseError(ValueError):
    """Timeline mentions courses the catalog does not know."""

    def __init__(self, courses: list[str]):
        self.courses = sorted(courses)
        super().__init__(f"timeline references unknown courses: {', '.join(self.courses)}")


def evaluate_results(tl: Timeline, rs: RuleSet, horizon: int) -> dict[str, tuple[int, ...]]:
    """Per-semester accumulator values for semesters 1..horizon.

    Planned courses trigger the same contributions a pass would; a plan is
    validated under the assumption that everything in it succeeds.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    deltas: dict[str, list[int]] = {name: [0] * (horizon + 1) for name in rs.result_names}
    for contribution in rs.contributions:
        for atom in tl.atoms:
            if contribution.trigger.matches(atom) and atom.sem <= horizon:
                deltas[contribution.result_name][atom.sem] += contribution.delta
    trajectories: dict[str, tuple[int, ...]] = {}
    for name, per_sem in deltas.items():
        running = 0
        values = []
        for sem in range(1, horizon + 1):
            running += per_sem[sem]
            values.append(running)
        trajectories[name] = tuple(values)
    return trajectories


def check_plan(tl: Timeline, rs: RuleSet, catalog: CmsDatabase | None = None) -> ValidationReport:
    """Validate the planned part of a timeline; the past is exempt."""
    return _check(tl, rs, catalog, audit=False)


def check_conformance(
    tl: Timeline, rs: RuleSet, catalog: CmsDatabase | None = None
) -> ValidationReport:
    """Validate a full history with the past-exemption disabled."""
    return _check(tl, rs, catalog, audit=True)


def _check(tl: Timeline, rs: RuleSet, catalog: CmsDatabase | None, audit: bool) -> ValidationReport:
    if catalog is not None:
        unknown = [c for c in sorted(tl.courses()) if c not in catalog.courses]
        if unknown:
            raise UnknownTimelineCourseError(unknown)

    horizon = max(
        [1, tl.now]
        + [atom.sem for atom in tl.atoms]
        + [req.checked_at for req in rs.requirements if isinstance(req, ResultRequirement)]
        + [req.checked_at for req in rs.defaults if isinstance(req, ResultRequirement)]
    )
    trajectories = evaluate_results(tl, rs, horizon)

    violations = _check_requirements(tl, rs, rs.requirements, audit)
    violations.extend(_check_availability(tl, rs, catalog, audit))
    warnings = _check_requirements(tl, rs, rs.defaults, audit)

    return ValidationReport(
        violations=_ordered(violations),
        warnings=_ordered(warnings),
        trajectories=trajectories,
    )


def _ordered(entries: list[ReportEntry]) -> tuple[ReportEntry, ...]:
    unique = list(dict.fromkeys(entries))
    unique.sort(key=lambda e: (e.semester, e.rule_id))
    return tuple(unique)


def _check_requirements(
    tl: Timeline,
    rs: RuleSet,
    requirements: tuple[Requirement, ...],
    audit: bool,
) -> list[ReportEntry]:
    entries: list[ReportEntry] = []
    for req in requirements:
        if isinstance(req, ResultRequirement):
            entries.extend(_check_result(tl, rs, req, audit))
        else:
            entries.extend(_check_precedence(tl, req, audit))
    return entries


def _check_result(
    tl: Timeline, rs: RuleSet, req: ResultRequirement, audit: bool
) -> list[ReportEntry]:
    if not audit and req.checked_at <= tl.now:
        return []
    value = 0
    for contribution in rs.contributions:
        if contribution.result_name != req.result_name:
            continue
        if req.filter_courses is not None and contribution.trigger.course_id not in req.filter_courses:
            continue
        for atom in tl.atoms:
            if contribution.trigger.matches(atom) and req.in_scope(atom.sem):
                value += contribution.delta
    if req.comparator.holds(value, req.bound):
        return []
    return [
        ReportEntry(
            rule_id=req.rule_id,
            semester=req.checked_at,
            courses=(),
            message=(
                f"{_describe_sum(req)} is {value}, required "
                f"{req.comparator.value} {req.bound} {_describe_when(req)}"
            ),
            actual=value,
            required=req.bound,
        )
    ]


def _describe_sum(req: ResultRequirement) -> str:
    if req.filter_courses:
        inner = ", ".join(sorted(req.filter_courses))
        return f"sum({req.result_name}, {{{inner}}})"
    return f"sum({req.result_name})"


def _describe_when(req: ResultRequirement) -> str:
    if req.deadline is not None:
        return f"by semester {req.deadline}"
    low, high = req.window
    return f"in semesters {low}..{high}"


def _check_precedence(tl: Timeline, req: PrecedenceRequirement, audit: bool) -> list[ReportEntry]:
    entries = []
    for atom in tl.atoms:
        if not req.after.matches(atom):
            continue
        if not audit and atom.sem <= tl.now:
            continue
        satisfied = any(
            req.before.matches(earlier) and earlier.sem < atom.sem for earlier in tl.atoms
        )
        if not satisfied:
            entries.append(
                ReportEntry(
                    rule_id=req.rule_id,
                    semester=atom.sem,
                    courses=(req.after.course_id,),
                    message=f"{req.before} must come before {req.after}",
                    actual=None,
                    required=None,
                )
            )
    return entries


def _check_availability(
    tl: Timeline, rs: RuleSet, catalog: CmsDatabase | None, audit: bool
) -> list[ReportEntry]:
    declared = rs.availability
    entries = []
    for atom in tl.atoms:
        if atom.kind not in _NEEDS_OFFERING:
            continue
        if not audit and atom.sem <= tl.now:
            continue
        rule = declared.get(atom.course_id)
        if rule is not None:
            rule_id, offered = rule.rule_id, rule.offered_terms
        elif catalog is not None and atom.course_id in catalog.courses:
            rule_id = f"avail:{atom.course_id}"
            offered = catalog.courses[atom.course_id].offered_terms
        else:
            continue
        term = tl.absolute_semester(atom.sem).term
        if offered.allows(term):
            continue
        entries.append(
            ReportEntry(
                rule_id=rule_id,
                semester=atom.sem,
                courses=(atom.course_id,),
                message=(
                    f"{atom.course_id} sits in semester {atom.sem}, a {term.value} term, "
                    f"but is offered only in {offered.value}"
                ),
                actual=None,
                required=None,
            )
        )
    return entries
