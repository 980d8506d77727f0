"""Line-oriented parser for the regulation rules language.

Each non-comment line is one statement. The parser tokenizes per line,
dispatches on the leading keyword, and collects every problem it finds
(syntax and reference errors alike) with line/column positions before
raising, so a rule file author sees all mistakes in one pass.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..cms import OfferedTerms
from .model import (
    AvailabilityRule,
    Comparator,
    Contribution,
    EventSpec,
    EventVerb,
    PrecedenceRequirement,
    ResultDecl,
    ResultRequirement,
    RuleCategory,
    RuleSet,
    Severity,
    Statement,
    DEFAULT_CATEGORY,
)


@dataclass(frozen=True, slots=True)
class RuleIssue:
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}"


class RuleParseError(ValueError):
    def __init__(self, issues: list[RuleIssue]):
        self.issues = list(issues)
        super().__init__(
            "rule file has {} problem(s):\n{}".format(
                len(self.issues), "\n".join(f"  {issue}" for issue in self.issues)
            )
        )


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>\d+)
  | (?P<sym>->|\+=|\.\.|<=|>=|[(){},<>=])
    """,
    re.VERBOSE,
)

_CMP_TEXT = {c.value for c in Comparator}
_VERBS = {v.value: v for v in EventVerb}


class _LineSyntaxError(Exception):
    def __init__(self, column: int, message: str):
        self.column = column
        self.message = message
        super().__init__(message)


def _tokenize_line(text: str, line_no: int) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos] == "#":
            break
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise _LineSyntaxError(pos + 1, f"unexpected character {text[pos]!r}")
        if match.lastgroup != "ws":
            tokens.append(_Token(match.lastgroup, match.group(), line_no, pos + 1))
        pos = match.end()
    return tokens


class _LineParser:
    def __init__(self, tokens: list[_Token], line_no: int, line_len: int):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no
        self.line_len = line_len

    def _fail(self, message: str, token: _Token | None = None) -> None:
        column = token.column if token else self.line_len + 1
        raise _LineSyntaxError(column, message)

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, kind: str | None = None, text: str | None = None, what: str = "") -> _Token:
        token = self.peek()
        expected = what or text or kind
        if token is None:
            raise _LineSyntaxError(self.line_len + 1, f"expected {expected}, line ends early")
        if kind is not None and token.kind != kind:
            self._fail(f"expected {expected}, found {token.text!r}", token)
        if text is not None and token.text != text:
            self._fail(f"expected {expected}, found {token.text!r}", token)
        self.pos += 1
        return token

    def take_int(self, what: str) -> tuple[int, _Token]:
        token = self.take("int", what=what)
        return int(token.text), token

    def done(self) -> None:
        token = self.peek()
        if token is not None:
            self._fail(f"unexpected trailing input {token.text!r}", token)

    def event_spec(self) -> EventSpec:
        token = self.take("word", what="event verb (pass/fail/take/register)")
        verb = _VERBS.get(token.text)
        if verb is None:
            self._fail(f"unknown event verb {token.text!r}", token)
        self.take("sym", "(")
        course = self.take("word", what="course id")
        self.take("sym", ")")
        return EventSpec(verb, course.text)

    def comparator(self) -> Comparator:
        token = self.peek()
        if token is None or token.text not in _CMP_TEXT:
            self._fail("expected a comparator (<, <=, =, >=, >)", token)
        self.pos += 1
        return Comparator(token.text)


def parse_rules(
    text: str,
    program_id: str | None = None,
    regulation_version: str | None = None,
) -> RuleSet:
    """Parse rule text into a RuleSet, raising RuleParseError on any problem."""
    issues: list[RuleIssue] = []
    statements: list[Statement] = []
    declared: dict[str, int] = {}
    result_uses: list[tuple[str, _Token]] = []
    offered_lines: dict[str, int] = {}
    category = DEFAULT_CATEGORY
    next_id = 1

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        try:
            tokens = _tokenize_line(raw_line, line_no)
        except _LineSyntaxError as exc:
            issues.append(RuleIssue(line_no, exc.column, exc.message))
            continue
        if not tokens:
            continue
        parser = _LineParser(tokens, line_no, len(raw_line))
        try:
            head = parser.take("word", what="statement keyword")
            if head.text == "category":
                token = parser.take("word", what="category name")
                parser.done()
                try:
                    category = RuleCategory(token.text)
                except ValueError:
                    parser._fail(f"unknown category keyword {token.text!r}", token)
            elif head.text == "result":
                name = parser.take("word", what="result name")
                parser.done()
                if name.text in declared:
                    parser._fail(
                        f"result {name.text!r} already declared on line {declared[name.text]}",
                        name,
                    )
                declared[name.text] = line_no
                statements.append(ResultDecl(name.text, category))
            elif head.text == "contributes":
                trigger = parser.event_spec()
                parser.take("sym", "->")
                name = parser.take("word", what="result name")
                parser.take("sym", "+=")
                delta, _ = parser.take_int("contribution amount")
                parser.done()
                result_uses.append((name.text, name))
                statements.append(Contribution(trigger, name.text, delta, category))
            elif head.text in ("require", "default"):
                severity = Severity.VIOLATION if head.text == "require" else Severity.WARNING
                statement = _parse_requirement(parser, f"R{next_id}", severity, category)
                if isinstance(statement, ResultRequirement):
                    result_uses.append((statement.result_name, tokens[1]))
                statements.append(statement)
                next_id += 1
            elif head.text == "offered":
                course = parser.take("word", what="course id")
                parser.take("word", "in")
                token = parser.take("word", what="term set (WS, SS or BOTH)")
                parser.done()
                try:
                    terms = OfferedTerms(token.text)
                except ValueError:
                    parser._fail(f"unknown term set {token.text!r}", token)
                if course.text in offered_lines:
                    parser._fail(
                        f"course {course.text!r} already has an offered rule "
                        f"on line {offered_lines[course.text]}",
                        course,
                    )
                offered_lines[course.text] = line_no
                statements.append(AvailabilityRule(f"R{next_id}", course.text, terms, category))
                next_id += 1
            else:
                parser._fail(f"unknown statement keyword {head.text!r}", head)
        except _LineSyntaxError as exc:
            issues.append(RuleIssue(line_no, exc.column, exc.message))

    for name, token in result_uses:
        if name not in declared:
            issues.append(
                RuleIssue(token.line, token.column, f"undeclared result {name!r}")
            )

    if issues:
        raise RuleParseError(issues)
    return RuleSet(program_id, regulation_version, tuple(statements))


def _parse_requirement(
    parser: _LineParser, rule_id: str, severity: Severity, category: RuleCategory
) -> ResultRequirement | PrecedenceRequirement:
    token = parser.peek()
    if token is None:
        parser._fail("expected sum(...) or an event pattern")
    if token.text == "sum":
        parser.take("word", "sum")
        parser.take("sym", "(")
        name = parser.take("word", what="result name")
        filter_courses = None
        if parser.peek() is not None and parser.peek().text == ",":
            parser.take("sym", ",")
            filter_courses = _parse_course_set(parser)
        parser.take("sym", ")")
        comparator = parser.comparator()
        bound, _ = parser.take_int("bound")
        keyword = parser.take("word", what="'by' or 'in'")
        if keyword.text == "by":
            parser.take("word", "sem")
            deadline, token = parser.take_int("deadline semester")
            parser.done()
            if deadline < 1:
                parser._fail("deadline semester must be >= 1", token)
            return ResultRequirement(
                rule_id, name.text, comparator, bound, deadline, None, severity, category,
                filter_courses,
            )
        if keyword.text == "in":
            parser.take("word", "sems")
            low, low_token = parser.take_int("window start")
            parser.take("sym", "..")
            high, high_token = parser.take_int("window end")
            parser.done()
            if low < 1:
                parser._fail("window start must be >= 1", low_token)
            if high < low:
                parser._fail("window end lies before its start", high_token)
            return ResultRequirement(
                rule_id, name.text, comparator, bound, None, (low, high), severity, category,
                filter_courses,
            )
        parser._fail(f"expected 'by sem' or 'in sems', found {keyword.text!r}", keyword)
    before = parser.event_spec()
    keyword = parser.take("word", "before")
    after = parser.event_spec()
    parser.done()
    if before == after:
        parser._fail("precedence rule relates an event to itself", keyword)
    return PrecedenceRequirement(rule_id, before, after, severity, category)


def _parse_course_set(parser: _LineParser) -> frozenset[str]:
    parser.take("sym", "{")
    courses = [parser.take("word", what="course id").text]
    while parser.peek() is not None and parser.peek().text == ",":
        parser.take("sym", ",")
        courses.append(parser.take("word", what="course id").text)
    parser.take("sym", "}")
    return frozenset(courses)


def load_rules(
    source: str | Path,
    program_id: str | None = None,
    regulation_version: str | None = None,
) -> RuleSet:
    """Parse a .rules file; missing binding falls back to the NAME-VERSION stem."""
    path = Path(source)
    if program_id is None and regulation_version is None:
        stem = path.stem
        if "-" in stem:
            program_id, _, regulation_version = stem.partition("-")
    return parse_rules(path.read_text(encoding="utf-8"), program_id, regulation_version)
