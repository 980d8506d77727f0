"""Academic semesters: parsing, formatting, ordering and relative counting.

A semester is a (term, year) pair where ``year`` is the calendar year the
term starts in. The summer term of a year precedes the winter term of the
same year; winter runs into the following calendar year, which is why the
short notation "WS21/22" exists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering


class Term(Enum):
    WINTER = "WS"
    SUMMER = "SS"


class SemesterParseError(ValueError):
    """Raised when a semester string cannot be interpreted."""


# Two-digit years are expanded with pivot 70: 70..99 -> 19xx, 00..69 -> 20xx.
_PIVOT = 70

_SEMESTER_RE = re.compile(
    r"^(?P<term>WS|SS)(?P<year>\d{2}|\d{4})(?:/(?P<second>\d{2}|\d{4}))?$"
)


def _expand_year(digits: str) -> int:
    year = int(digits)
    if len(digits) == 2:
        return 1900 + year if year >= _PIVOT else 2000 + year
    return year


@total_ordering
@dataclass(frozen=True, slots=True)
class Semester:
    term: Term
    year: int

    def __str__(self) -> str:
        return f"{self.term.value}{self.year}"

    @property
    def ordinal(self) -> int:
        """Position on the global semester axis; consecutive semesters differ by 1."""
        return self.year * 2 + (1 if self.term is Term.WINTER else 0)

    def __lt__(self, other: "Semester") -> bool:
        if not isinstance(other, Semester):
            return NotImplemented
        return self.ordinal < other.ordinal

    def next(self) -> "Semester":
        if self.term is Term.SUMMER:
            return Semester(Term.WINTER, self.year)
        return Semester(Term.SUMMER, self.year + 1)

    def advance(self, count: int) -> "Semester":
        """Semester ``count`` steps later (earlier for negative counts)."""
        ordinal = self.ordinal + count
        year, parity = divmod(ordinal, 2)
        return Semester(Term.WINTER if parity else Term.SUMMER, year)


def parse_semester(text: str) -> Semester:
    """Parse "WS2021", "WS21", "WS21/22", "WS2021/2022", "SS2022" or "SS22".

    The winter pair notation must name two consecutive years. Raises
    :class:`SemesterParseError` naming the offending token otherwise.
    """
    token = text.strip()
    match = _SEMESTER_RE.match(token)
    if match is None:
        raise SemesterParseError(f"not a semester: {token!r}")
    term = Term.WINTER if match.group("term") == "WS" else Term.SUMMER
    year = _expand_year(match.group("year"))
    second = match.group("second")
    if second is not None:
        if term is not Term.WINTER:
            raise SemesterParseError(f"year pair is only valid for winter terms: {token!r}")
        if _expand_year(second) != year + 1:
            raise SemesterParseError(f"winter term years must be consecutive: {token!r}")
    return Semester(term, year)


def format_semester(semester: Semester) -> str:
    """Canonical form, e.g. "WS2021" or "SS2022"; inverse of :func:`parse_semester`."""
    return str(semester)


def semester_index(semester: Semester, origin: Semester) -> int:
    """1-based count of semesters from ``origin`` to ``semester`` inclusive.

    ``origin`` itself is 1, its successor 2; semesters before the origin get
    values <= 0.
    """
    return semester.ordinal - origin.ordinal + 1


def semester_range(start: Semester, count: int) -> list[Semester]:
    """The ``count`` consecutive semesters beginning at ``start``."""
    return [start.advance(i) for i in range(count)]
