"""Regulation rules: language, model, and timeline validation."""

from .engine import (
    UnknownTimelineCourseError,
    check_conformance,
    check_plan,
    evaluate_results,
)
from .formatter import format_rules
from .model import (
    AtomKind,
    AvailabilityRule,
    Comparator,
    Contribution,
    EventAtom,
    EventSpec,
    EventVerb,
    PrecedenceRequirement,
    Provenance,
    ReportEntry,
    ResultDecl,
    ResultRequirement,
    RuleCategory,
    RuleModelError,
    RuleSet,
    Severity,
    Timeline,
    ValidationReport,
    load_timeline,
    timeline_from_dict,
)
from .parser import RuleIssue, RuleParseError, load_rules, parse_rules

__all__ = [
    "AtomKind",
    "AvailabilityRule",
    "Comparator",
    "Contribution",
    "EventAtom",
    "EventSpec",
    "EventVerb",
    "PrecedenceRequirement",
    "Provenance",
    "ReportEntry",
    "ResultDecl",
    "ResultRequirement",
    "RuleCategory",
    "RuleIssue",
    "RuleModelError",
    "RuleParseError",
    "RuleSet",
    "Severity",
    "Timeline",
    "UnknownTimelineCourseError",
    "ValidationReport",
    "check_conformance",
    "check_plan",
    "evaluate_results",
    "format_rules",
    "load_rules",
    "load_timeline",
    "parse_rules",
    "timeline_from_dict",
]
