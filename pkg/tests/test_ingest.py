from __future__ import annotations

import shutil
from decimal import Decimal
from pathlib import Path

import pytest

from studyflow.cms import EnrollmentStatus, ExamResult, OfferedTerms
from studyflow.ingest import IngestionError, audit_database, ingest_cms


def _mutate(src: Path, tmp: Path, filename: str, transform) -> Path:
    """Copy the fixture directory and rewrite one file through ``transform``."""
    dest = tmp / "campus"
    shutil.copytree(src, dest)
    target = dest / filename
    target.write_text(transform(target.read_text(encoding="utf-8")), encoding="utf-8")
    return dest


def test_tiny_fixture_shape(tiny_db):
    assert len(tiny_db.students) == 3
    assert len(tiny_db.courses) == 5
    assert len(tiny_db.exams) == 12


def test_course_attributes(tiny_db):
    math = tiny_db.courses["MATH1"]
    assert math.credit_points == 9
    assert math.offered_terms is OfferedTerms.BOTH
    assert tiny_db.courses["PROG"].offered_terms is OfferedTerms.WINTER_ONLY
    assert tiny_db.courses["LA"].offered_terms is OfferedTerms.SUMMER_ONLY


def test_enrollment_status_timeline(tiny_db):
    enrollment = tiny_db.enrollment("S1", "CS")
    assert enrollment is not None
    assert enrollment.semesters_studied == 6
    assert enrollment.final_status() is EnrollmentStatus.GRADUATED
    assert str(enrollment.start_semester) == "WS2021"


def test_exam_grades_and_results(tiny_db):
    attempts = [r for r in tiny_db.exams_for_case("S3", "CS") if r.course_id == "MATH1"]
    assert [r.attempt_no for r in attempts] == [1, 2, 3]
    assert [r.result for r in attempts] == [ExamResult.FAILED, ExamResult.FAILED, ExamResult.PASSED]
    assert attempts[-1].grade == Decimal("3.7")


def test_exams_sorted_deterministically(tiny_db):
    keys = [(r.student_id, r.program_id, r.course_id, r.attempt_no) for r in tiny_db.exams]
    assert keys == sorted(keys)


def test_programs_listing(tiny_db):
    assert tiny_db.programs() == [("CS", "2018")]
    assert tiny_db.program_ids() == ["CS"]


def test_audit_clean_fixture(tiny_db):
    assert audit_database(tiny_db) == []


def test_missing_file_reported(tmp_path, tiny_campus_dir):
    dest = tmp_path / "campus"
    shutil.copytree(tiny_campus_dir, dest)
    (dest / "exams.csv").unlink()
    with pytest.raises(IngestionError) as exc:
        ingest_cms(dest)
    assert any("missing input file" in issue.message for issue in exc.value.issues)


def test_unknown_course_reference(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "exams.csv",
        lambda text: text + "S1,CS,GHOST,1,WS2021,2022-02-01,2021-11-15,,P,2.0\n",
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    issues = exc.value.issues
    assert any(i.file == "exams.csv" and "GHOST" in i.message for i in issues)
    assert all(i.line > 1 for i in issues)


def test_unknown_student_reference(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "exams.csv",
        lambda text: text + "S9,CS,PROG,1,WS2021,2022-02-01,2021-11-15,,P,2.0\n",
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert any("S9" in i.message for i in exc.value.issues)


def test_duplicate_pass_rejected(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "exams.csv",
        lambda text: text + "S1,CS,PROG,2,WS2021,2022-02-20,2021-12-01,,P,1.3\n",
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert any("more than one passed" in i.message for i in exc.value.issues)


def test_attempt_gap_rejected(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "exams.csv",
        lambda text: text + "S2,CS,LA,3,SS2022,2022-07-25,2022-05-02,,F,5.0\n",
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert any("consecutive" in i.message for i in exc.value.issues)


def test_duplicate_exam_row_rejected(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "exams.csv",
        lambda text: text + "S1,CS,PROG,1,WS2021,2022-02-10,2021-12-01,,P,1.7\n",
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert any("duplicate exam row" in i.message for i in exc.value.issues)


def test_malformed_semester_field(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "enrollments.csv",
        lambda text: text.replace("S3,CS,2018,WS2021,WS2021,enrolled", "S3,CS,2018,WS2021,banana,enrolled"),
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert any(i.field == "semester" for i in exc.value.issues)


def test_pass_without_grade_rejected(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "exams.csv",
        lambda text: text.replace(
            "S1,CS,PROG,1,WS2021,2022-02-10,2021-12-01,,P,1.7",
            "S1,CS,PROG,1,WS2021,2022-02-10,2021-12-01,,P,",
        ),
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert any("requires a grade" in i.message for i in exc.value.issues)


def test_pass_with_failing_grade_rejected(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "exams.csv",
        lambda text: text.replace(
            "S1,CS,PROG,1,WS2021,2022-02-10,2021-12-01,,P,1.7",
            "S1,CS,PROG,1,WS2021,2022-02-10,2021-12-01,,P,5.0",
        ),
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert any("pass threshold" in i.message for i in exc.value.issues)


def test_noncontiguous_statuses_rejected(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "enrollments.csv",
        lambda text: text.replace("S2,CS,2018,WS2021,SS2022,enrolled\n", ""),
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert any("contiguous" in i.message for i in exc.value.issues)


def test_terminal_status_must_be_last(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "enrollments.csv",
        lambda text: text.replace("S2,CS,2018,WS2021,SS2022,enrolled", "S2,CS,2018,WS2021,SS2022,graduated"),
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert any("final status" in i.message for i in exc.value.issues)


def test_exam_without_scheduled_offering_rejected(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "scheduled.csv",
        lambda text: text.replace("PROG,WS2021,CS,1\n", ""),
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert any("not scheduled" in i.message for i in exc.value.issues)


def test_schedule_conflicts_with_offered_terms(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "scheduled.csv",
        lambda text: text + "PROG,SS2022,CS,1\n",
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert any("offered" in i.message for i in exc.value.issues)


def test_all_issues_collected_in_one_pass(tmp_path, tiny_campus_dir):
    campus = _mutate(
        tiny_campus_dir,
        tmp_path,
        "exams.csv",
        lambda text: text
        + "S9,CS,PROG,1,WS2021,2022-02-01,2021-11-15,,P,2.0\n"
        + "S1,CS,GHOST,1,WS2021,2022-02-01,2021-11-15,,P,2.0\n",
    )
    with pytest.raises(IngestionError) as exc:
        ingest_cms(campus)
    assert len(exc.value.issues) >= 2


def test_row_order_does_not_matter(tmp_path, tiny_campus_dir):
    def shuffle_rows(text: str) -> str:
        lines = text.strip().split("\n")
        return "\n".join([lines[0]] + list(reversed(lines[1:]))) + "\n"

    campus = _mutate(tiny_campus_dir, tmp_path, "exams.csv", shuffle_rows)
    shuffled = ingest_cms(campus)
    original = ingest_cms(tiny_campus_dir)
    assert shuffled.exams == original.exams
