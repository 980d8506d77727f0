"""Canonical text form for rulesets.

Statement order is preserved (it fixes rule ids), spacing is normalized,
and category lines are emitted only where the active category changes.
Formatting then re-parsing a ruleset yields a structurally equal ruleset.
"""

from __future__ import annotations

from .model import (
    AvailabilityRule,
    Contribution,
    PrecedenceRequirement,
    ResultDecl,
    ResultRequirement,
    RuleSet,
    Severity,
    DEFAULT_CATEGORY,
)

_HEADER = "# regulation rules"


def format_rules(rs: RuleSet) -> str:
    lines = [_header_for(rs)]
    category = DEFAULT_CATEGORY
    for stmt in rs.statements:
        if stmt.category is not category:
            lines.append(f"category {stmt.category.value}")
            category = stmt.category
        lines.append(_format_statement(stmt))
    return "\n".join(lines) + "\n"


def _header_for(rs: RuleSet) -> str:
    if rs.program_id and rs.regulation_version:
        return f"{_HEADER}: {rs.program_id} {rs.regulation_version}"
    return _HEADER


def _format_statement(stmt) -> str:
    if isinstance(stmt, ResultDecl):
        return f"result {stmt.name}"
    if isinstance(stmt, Contribution):
        return f"contributes {stmt.trigger} -> {stmt.result_name} += {stmt.delta}"
    if isinstance(stmt, ResultRequirement):
        keyword = "require" if stmt.severity is Severity.VIOLATION else "default"
        head = f"sum({stmt.result_name}"
        if stmt.filter_courses:
            head += ", {" + ", ".join(sorted(stmt.filter_courses)) + "}"
        head += f") {stmt.comparator.value} {stmt.bound}"
        if stmt.deadline is not None:
            return f"{keyword} {head} by sem {stmt.deadline}"
        low, high = stmt.window
        return f"{keyword} {head} in sems {low}..{high}"
    if isinstance(stmt, PrecedenceRequirement):
        keyword = "require" if stmt.severity is Severity.VIOLATION else "default"
        return f"{keyword} {stmt.before} before {stmt.after}"
    if isinstance(stmt, AvailabilityRule):
        return f"offered {stmt.course_id} in {stmt.offered_terms.value}"
    raise TypeError(f"unknown statement type {type(stmt).__name__}")
