"""Command-line front end for batch analytics and the planning service.

Exit codes: 0 success, 1 domain findings (data problems, rule violations
under --strict, undefined KPIs), 2 usage and I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .cms import UnknownProgramError, cohort_from_spec
from .config import ConfigError, load_config
from .dfg import TiePolicy, discover_dfg, export_dot
from .eventlog import (
    ActivityMode,
    EventFilter,
    LogBuildError,
    LogConfig,
    OccurrenceMode,
    TimestampMode,
    build_log,
)
from .ingest import IngestionError, ingest_cms
from .jsonout import canonical_json_bytes
from .kpi import UndefinedKpiError
from .mining import MiningError, candidates_to_defaults, mine_precedence_defaults
from .petri import export_net_dot, export_pnml, load_plan, plan_to_petri
from .reporting import (
    KPI_KINDS,
    KpiRequestError,
    conformance_log,
    deviations_payload,
    kpi_payload,
)
from .rules.engine import UnknownTimelineCourseError, check_conformance, check_plan
from .rules.formatter import format_rules
from .rules.model import RuleModelError, load_timeline
from .rules.parser import RuleParseError, load_rules
from .semester import SemesterParseError
from .xes import export_xes

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def _emit(payload) -> None:
    sys.stdout.buffer.write(canonical_json_bytes(payload))
    sys.stdout.buffer.flush()


def _load_db(args):
    return ingest_cms(Path(args.data))


class _UsageError(Exception):
    pass


def _cohort(args):
    return cohort_from_spec(args.program, args.cohort)


def _log_config(args) -> LogConfig:
    return LogConfig(
        cohort=_cohort(args),
        activity_mode=ActivityMode(args.activity),
        timestamp_mode=TimestampMode(args.timestamps),
        occurrence_mode=(
            OccurrenceMode.FIRST_ONLY if args.first_only else OccurrenceMode.ALL
        ),
        event_filter=EventFilter(args.event_filter),
        mandatory_only=args.mandatory_only,
    )


def _add_data_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="directory with the CSV export set")


def _add_cohort_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--program", required=True, help="program id")
    parser.add_argument(
        "--cohort",
        required=True,
        help="cohort spec: WS2021, start:WS2021, version:2018 or studied:4",
    )


def _add_log_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--activity", choices=[m.value for m in ActivityMode], default="course"
    )
    parser.add_argument(
        "--timestamps", choices=[m.value for m in TimestampMode], default="semester"
    )
    parser.add_argument("--first-only", action="store_true", help="one event per course")
    parser.add_argument(
        "--mandatory-only", action="store_true", help="drop non-mandatory courses"
    )
    parser.add_argument(
        "--event-filter",
        dest="event_filter",
        choices=[m.value for m in EventFilter],
        default="all",
    )


def cmd_ingest_check(args) -> int:
    try:
        db = ingest_cms(Path(args.data))
    except IngestionError as exc:
        _emit(
            {
                "ok": False,
                "issues": [
                    {
                        "file": issue.file,
                        "line": issue.line,
                        "field": issue.field,
                        "message": issue.message,
                    }
                    for issue in exc.issues
                ],
            }
        )
        return EXIT_DOMAIN
    _emit(
        {
            "ok": True,
            "students": len(db.students),
            "courses": len(db.courses),
            "scheduled": len(db.scheduled),
            "exams": len(db.exams),
            "programs": [
                {"program_id": pid, "regulation_version": version}
                for pid, version in db.programs()
            ],
        }
    )
    return EXIT_OK


def cmd_build_log(args) -> int:
    db = _load_db(args)
    log = build_log(db, _log_config(args))
    export_xes(log, Path(args.out))
    _emit({"out": str(args.out), "traces": len(log), "events": log.event_count()})
    return EXIT_OK


def cmd_kpi(args) -> int:
    db = _load_db(args)
    payload = kpi_payload(db, args.kind, _cohort(args), args.course, args.sem, args.within)
    _emit(payload)
    return EXIT_OK


def cmd_dfg(args) -> int:
    db = _load_db(args)
    log = build_log(db, _log_config(args))
    dfg = discover_dfg(log, TiePolicy(args.tie_policy))
    Path(args.out).write_text(export_dot(dfg), encoding="utf-8")
    _emit(
        {
            "out": str(args.out),
            "nodes": len(dfg.nodes),
            "edges": len(dfg.edges),
            "traces": len(log),
        }
    )
    return EXIT_OK


def cmd_conform(args) -> int:
    db = _load_db(args)
    plan = load_plan(Path(args.plan), db)
    log = conformance_log(db, _cohort(args))
    payload = deviations_payload(plan, log, EventFilter(args.event_filter))
    if args.pnml:
        Path(args.pnml).write_bytes(export_pnml(plan_to_petri(plan)))
    if args.dot:
        Path(args.dot).write_text(export_net_dot(plan_to_petri(plan)), encoding="utf-8")
    _emit(payload)
    return EXIT_OK


def cmd_validate(args) -> int:
    timeline = load_timeline(Path(args.timeline))
    if args.rules:
        ruleset = load_rules(Path(args.rules))
    else:
        rules_dir = Path(args.rules_dir)
        path = rules_dir / f"{timeline.program_id}-{timeline.regulation_version}.rules"
        if not path.is_file():
            raise _UsageError(f"no rules file for timeline binding: {path}")
        ruleset = load_rules(path)
    catalog = ingest_cms(Path(args.data)) if args.data else None
    checker = check_conformance if args.audit else check_plan
    report = checker(timeline, ruleset, catalog)
    _emit(report.as_dict())
    if args.strict and report.violations:
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_mine(args) -> int:
    db = _load_db(args)
    candidates = mine_precedence_defaults(db, _cohort(args), args.min_support, args.min_lift)
    payload = {
        "min_support": args.min_support,
        "min_lift": args.min_lift,
        "candidates": [candidate.as_dict() for candidate in candidates],
    }
    if args.rules:
        ruleset = load_rules(Path(args.rules))
        merged, notices = candidates_to_defaults(candidates, ruleset)
        Path(args.out_rules).write_text(format_rules(merged), encoding="utf-8")
        payload["merged_out"] = str(args.out_rules)
        payload["notices"] = notices
    _emit(payload)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = load_config(args.config)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="studyflow",
        description="Study-program analytics, conformance checking, and plan validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-check", help="validate a CSV export set")
    _add_data_flags(p)
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("build-log", help="build an event log and write XES")
    _add_data_flags(p)
    _add_cohort_flags(p)
    _add_log_flags(p)
    p.add_argument("--out", required=True, help="XES output path")
    p.set_defaults(func=cmd_build_log)

    p = sub.add_parser("kpi", help="compute one KPI for a cohort")
    _add_data_flags(p)
    _add_cohort_flags(p)
    p.add_argument("--kind", required=True, choices=list(KPI_KINDS))
    p.add_argument("--course", help="course id, for per-course KPIs")
    p.add_argument("--sem", type=int, help="relative semester index")
    p.add_argument("--within", type=int, help="semester horizon for dropout-rate")
    p.set_defaults(func=cmd_kpi)

    p = sub.add_parser("dfg", help="discover a directly-follows graph, write DOT")
    _add_data_flags(p)
    _add_cohort_flags(p)
    _add_log_flags(p)
    p.add_argument(
        "--tie-policy", choices=[t.value for t in TiePolicy], default="skip_ties"
    )
    p.add_argument("--out", required=True, help="DOT output path")
    p.set_defaults(func=cmd_dfg)

    p = sub.add_parser("conform", help="replay a cohort log against a recommended plan")
    _add_data_flags(p)
    _add_cohort_flags(p)
    p.add_argument("--plan", required=True, help="recommended plan JSON file")
    p.add_argument(
        "--event-filter",
        dest="event_filter",
        choices=[m.value for m in EventFilter],
        default="all",
    )
    p.add_argument("--pnml", help="also write the plan net as PNML")
    p.add_argument("--dot", help="also write the plan net as DOT")
    p.set_defaults(func=cmd_conform)

    p = sub.add_parser("validate", help="check a timeline against regulation rules")
    p.add_argument("--timeline", required=True, help="timeline JSON file")
    p.add_argument("--rules", help="rules file (overrides --rules-dir lookup)")
    p.add_argument("--rules-dir", default=".", help="directory of PROGRAM-VERSION.rules files")
    p.add_argument("--data", help="CSV directory for catalog-aware checks")
    p.add_argument("--audit", action="store_true", help="check the past too")
    p.add_argument("--strict", action="store_true", help="exit 1 when violations exist")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("mine", help="mine course-order recommendations")
    _add_data_flags(p)
    _add_cohort_flags(p)
    p.add_argument("--min-support", type=int, required=True)
    p.add_argument("--min-lift", required=True, help="minimum pass-rate lift, e.g. 0.3")
    p.add_argument("--rules", help="merge candidates into this rules file")
    p.add_argument("--out-rules", help="output path for the merged rules file")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True, help="key=value config file")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "mine" and bool(args.rules) != bool(args.out_rules):
        parser.error("--rules and --out-rules must be used together")
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError, PermissionError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        IngestionError,
        LogBuildError,
        RuleParseError,
        RuleModelError,
        MiningError,
        UndefinedKpiError,
        KpiRequestError,
        UnknownTimelineCourseError,
        UnknownProgramError,
        SemesterParseError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
