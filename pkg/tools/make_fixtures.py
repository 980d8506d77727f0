#!/usr/bin/env python3
"""Regenerate the synthetic CSV fixture sets used by the test suite.

Both sets are deterministic: fixed seeds, fixed row ordering. Regenerating
into a clean directory must reproduce the committed files byte for byte.

  synth50   50 students, mixed outcomes, for KPI oracle comparisons
  miner30   30 students with one planted course dependency (STAT -> IDS)
"""

from __future__ import annotations

import argparse
import csv
import random
from datetime import date, timedelta
from pathlib import Path

SYNTH50_SEED = 20260815
MINER30_SEED = 404

_CS_COURSES = [
    # (course_id, title, credit_points, offered_terms, mandatory)
    ("PROG", "Programming", 6, "WS", 1),
    ("MATH1", "Mathematics 1", 9, "BOTH", 1),
    ("LA", "Linear Algebra", 9, "SS", 1),
    ("DB", "Databases", 9, "WS", 1),
    ("ALG", "Algorithms", 9, "SS", 1),
    ("THEO", "Theoretical Computer Science", 9, "WS", 1),
    ("PROSEM", "Proseminar", 3, "BOTH", 0),
    ("SEM", "Seminar", 5, "BOTH", 0),
    ("STAT", "Statistics", 6, "WS", 0),
    ("IDS", "Introduction to Data Science", 6, "SS", 0),
]

_MINER_COURSES = [
    ("STAT", "Statistics", 6, "WS", 1),
    ("IDS", "Introduction to Data Science", 6, "SS", 1),
    ("N1", "Noise Course 1", 6, "BOTH", 1),
    ("N2", "Noise Course 2", 6, "BOTH", 1),
    ("N3", "Noise Course 3", 6, "BOTH", 1),
    ("N4", "Noise Course 4", 6, "BOTH", 1),
]

_PASS_GRADES = ["1.0", "1.3", "1.7", "2.0", "2.3", "2.7", "3.0", "3.3", "3.7", "4.0"]
_FAIL_GRADES = ["4.3", "4.7", "5.0"]


def _semester(term: str, year: int) -> str:
    return f"{term}{year}"


def _advance(term: str, year: int, count: int = 1) -> tuple[str, int]:
    for _ in range(count):
        term, year = ("WS", year) if term == "SS" else ("SS", year + 1)
    return term, year


def _term_allows(offered: str, term: str) -> bool:
    return offered == "BOTH" or offered == term


def _exam_date(term: str, year: int, jitter: int) -> date:
    if term == "WS":
        return date(year + 1, 2, 1) + timedelta(days=jitter)
    return date(year, 7, 1) + timedelta(days=jitter)


def _registration_date(term: str, year: int) -> date:
    if term == "WS":
        return date(year, 11, 15)
    return date(year, 5, 10)


class _CampusBuilder:
    """Accumulates rows while keeping ingestion invariants satisfied."""

    def __init__(self, program_id: str, regulation_version: str, courses):
        self.program_id = program_id
        self.version = regulation_version
        self.courses = courses
        self.offered = {c[0]: c[3] for c in courses}
        self.mandatory = {c[0]: c[4] for c in courses}
        self.students: list[str] = []
        self.enrollments: list[tuple] = []
        self.exams: list[tuple] = []
        self.scheduled: set[tuple[str, str]] = set()

    def add_student(self, student_id: str, start: tuple[str, int]):
        self.students.append(student_id)
        return _StudentTrack(self, student_id, start)

    def write(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "students.csv", "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["student_id"])
            writer.writerows([[s] for s in self.students])
        with open(out_dir / "courses.csv", "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["course_id", "title", "credit_points", "offered_terms"])
            writer.writerows([c[:4] for c in self.courses])
        with open(out_dir / "scheduled.csv", "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["course_id", "semester", "program_id", "mandatory"])
            for course_id, semester in sorted(self.scheduled):
                writer.writerow([course_id, semester, self.program_id, self.mandatory[course_id]])
        with open(out_dir / "enrollments.csv", "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                ["student_id", "program_id", "regulation_version", "start_semester", "semester", "status"]
            )
            writer.writerows(self.enrollments)
        with open(out_dir / "exams.csv", "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                [
                    "student_id",
                    "program_id",
                    "course_id",
                    "attempt_no",
                    "semester",
                    "exam_date",
                    "registration_date",
                    "deregistration_date",
                    "result",
                    "grade",
                ]
            )
            writer.writerows(self.exams)


class _StudentTrack:
    def __init__(self, builder: _CampusBuilder, student_id: str, start: tuple[str, int]):
        self.builder = builder
        self.student_id = student_id
        self.start = start
        self.max_sem_index = 1

    def _sem_at(self, index: int) -> tuple[str, int]:
        return _advance(*self.start, index - 1)

    def next_allowed(self, course_id: str, index: int) -> int:
        """First semester index >= index whose term the course is offered in."""
        offered = self.builder.offered[course_id]
        while not _term_allows(offered, self._sem_at(index)[0]):
            index += 1
        return index

    def add_exam(self, course_id: str, attempt_no: int, index: int, result: str, grade: str, jitter: int):
        term, year = self._sem_at(index)
        semester = _semester(term, year)
        self.builder.scheduled.add((course_id, semester))
        exam_day = "" if result in ("NT", "D") else _exam_date(term, year, jitter).isoformat()
        dereg = (
            (_registration_date(term, year) + timedelta(days=20)).isoformat()
            if result == "D"
            else ""
        )
        self.builder.exams.append(
            (
                self.student_id,
                self.builder.program_id,
                course_id,
                attempt_no,
                semester,
                exam_day,
                _registration_date(term, year).isoformat(),
                dereg,
                result,
                grade,
            )
        )
        self.max_sem_index = max(self.max_sem_index, index)

    def finish(self, final_status: str, final_index: int) -> None:
        final_index = max(final_index, self.max_sem_index)
        for index in range(1, final_index + 1):
            term, year = self._sem_at(index)
            status = final_status if index == final_index else "enrolled"
            self.builder.enrollments.append(
                (
                    self.student_id,
                    self.builder.program_id,
                    self.builder.version,
                    _semester(*self.start),
                    _semester(term, year),
                    status,
                )
            )


def make_synth50(out_dir: Path) -> None:
    rng = random.Random(SYNTH50_SEED)
    builder = _CampusBuilder("CS", "2018", _CS_COURSES)
    starts = [("WS", 2020), ("SS", 2021), ("WS", 2021)]
    for number in range(1, 51):
        student_id = f"P{number:03d}"
        track = builder.add_student(student_id, starts[number % len(starts)])
        for course_id, _, _, _, _ in _CS_COURSES:
            if rng.random() > 0.8:
                continue
            index = track.next_allowed(course_id, rng.randint(1, 4))
            passed = False
            for attempt in range(1, rng.randint(1, 3) + 1):
                roll = rng.random()
                if roll < 0.08:
                    result, grade = "D", ""
                elif roll < 0.18:
                    result, grade = "NT", ""
                elif roll < 0.70:
                    result, grade = "P", rng.choice(_PASS_GRADES)
                else:
                    result, grade = "F", rng.choice(_FAIL_GRADES)
                track.add_exam(course_id, attempt, index, result, grade, rng.randint(0, 20))
                if result == "P":
                    passed = True
                    break
                index = track.next_allowed(course_id, index + 1)
            del passed
        fate = rng.random()
        if fate < 0.30:
            track.finish("graduated", max(track.max_sem_index, 6))
        elif fate < 0.45:
            track.finish("dropped_out", max(track.max_sem_index, 2))
        else:
            track.finish("enrolled", max(track.max_sem_index, 4))
    builder.write(out_dir)


def make_miner30(out_dir: Path) -> None:
    rng = random.Random(MINER30_SEED)
    builder = _CampusBuilder("DS", "2020", _MINER_COURSES)
    for number in range(1, 31):
        student_id = f"M{number:02d}"
        track = builder.add_student(student_id, ("WS", 2020))
        prepared = number <= 15
        if prepared:
            # STAT passed in semester 1, strictly before the first IDS attempt.
            track.add_exam("STAT", 1, 1, "P", rng.choice(_PASS_GRADES), rng.randint(0, 20))
            ids_pass = rng.random() < 0.9
        else:
            if number % 2 == 0:
                # STAT only after IDS; preparation effect absent.
                track.add_exam("STAT", 1, 3, "P", rng.choice(_PASS_GRADES), rng.randint(0, 20))
            ids_pass = rng.random() < 0.3
        track.add_exam(
            "IDS",
            1,
            2,
            "P" if ids_pass else "F",
            rng.choice(_PASS_GRADES) if ids_pass else rng.choice(_FAIL_GRADES),
            rng.randint(0, 20),
        )
        for noise in ("N1", "N2", "N3", "N4"):
            if rng.random() > 0.7:
                continue
            index = rng.randint(1, 4)
            passed = rng.random() < 0.55
            track.add_exam(
                noise,
                1,
                index,
                "P" if passed else "F",
                rng.choice(_PASS_GRADES) if passed else rng.choice(_FAIL_GRADES),
                rng.randint(0, 20),
            )
        track.finish("enrolled", max(track.max_sem_index, 4))
    builder.write(out_dir)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="tests/fixtures", help="parent directory for fixture sets")
    args = parser.parse_args()
    base = Path(args.out)
    make_synth50(base / "synth50")
    make_miner30(base / "miner30")
    print(f"wrote {base / 'synth50'} (seed {SYNTH50_SEED}) and {base / 'miner30'} (seed {MINER30_SEED})")


if __name__ == "__main__":
    main()
