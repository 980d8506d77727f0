"""XES 1.0 export for event logs.

Semester timestamps are mapped to the first calendar day of the term
(winter -> Oct 1, summer -> Apr 1) so standard process-mining tools can
read the files; the convention is recorded in the file header comment.
"""

from __future__ import annotations

import io
from datetime import date, datetime, timezone
from pathlib import Path
from xml.etree import ElementTree as ET

from .eventlog import EventLog
from .semester import Semester, Term

XES_NS = "http://www.xes-standard.org/"

_HEADER_COMMENT = (
    " exported event log; semester timestamps use the first day of the term "
    "(winter: Oct 1, summer: Apr 1) "
)


def semester_to_date(semester: Semester) -> date:
    if semester.term is Term.WINTER:
        return date(semester.year, 10, 1)
    return date(semester.year, 4, 1)


def _iso_timestamp(value: Semester | date) -> str:
    day = semester_to_date(value) if isinstance(value, Semester) else value
    return datetime(day.year, day.month, day.day, tzinfo=timezone.utc).isoformat()


def _string(parent: ET.Element, key: str, value: str) -> None:
    ET.SubElement(parent, "string", {"key": key, "value": value})


def export_xes(log: EventLog, destination: str | Path | io.IOBase) -> None:
    """Write ``log`` as XES 1.0 XML to a path or binary file object."""
    root = ET.Element("log", {"xes.version": "1.0", "xes.features": "", "xmlns": XES_NS})
    root.append(ET.Comment(_HEADER_COMMENT))
    for name, prefix, uri in (
        ("Concept", "concept", "http://www.xes-standard.org/concept.xesext"),
        ("Time", "time", "http://www.xes-standard.org/time.xesext"),
    ):
        ET.SubElement(root, "extension", {"name": name, "prefix": prefix, "uri": uri})

    for trace in log.traces:
        trace_el = ET.SubElement(root, "trace")
        _string(trace_el, "concept:name", "|".join(trace.case_id))
        for event in trace.events:
            event_el = ET.SubElement(trace_el, "event")
            _string(event_el, "concept:name", event.activity)
            ET.SubElement(
                event_el, "date", {"key": "time:timestamp", "value": _iso_timestamp(event.timestamp)}
            )
            for key, value in event.attrs.items():
                _string(event_el, key, str(value))

    tree = ET.ElementTree(root)
    ET.indent(tree)
    tree.write(destination, encoding="utf-8", xml_declaration=True)
