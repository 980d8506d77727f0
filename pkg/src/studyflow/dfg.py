"""Directly-follows graph discovery with explicit tie handling.

Semester timestamps leave same-semester events unordered; the default
skip_ties policy therefore only counts edges across adjacent timestamp
groups and never fabricates an order inside a group. expand_ties opts into
the stable per-trace linearization instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .eventlog import EventLog, same_timestamp_groups


class TiePolicy(Enum):
    SKIP_TIES = "skip_ties"
    EXPAND_TIES = "expand_ties"


@dataclass
class Dfg:
    nodes: dict[str, int] = field(default_factory=dict)
    edges: dict[tuple[str, str], int] = field(default_factory=dict)
    start_freq: dict[str, int] = field(default_factory=dict)
    end_freq: dict[str, int] = field(default_factory=dict)

    def total_edge_frequency(self) -> int:
        return sum(self.edges.values())

    def as_dict(self) -> dict:
        return {
            "nodes": dict(sorted(self.nodes.items())),
            "edges": [
                {"from": a, "to": b, "frequency": count}
                for (a, b), count in sorted(self.edges.items())
            ],
            "start": dict(sorted(self.start_freq.items())),
            "end": dict(sorted(self.end_freq.items())),
        }


def _bump(counter: dict, key, amount: int = 1) -> None:
    counter[key] = counter.get(key, 0) + amount


def discover_dfg(log: EventLog, tie_policy: TiePolicy = TiePolicy.SKIP_TIES) -> Dfg:
    """Count directly-follows relations across all traces.

    skip_ties: an edge (a, b) is counted for every pair of events from two
    adjacent timestamp groups; pairs inside one group are never counted.
    expand_ties: each trace is linearized by ordinal and every consecutive
    pair is counted, contributing exactly len(trace) - 1 edge counts.
    Start/end frequencies come from the first/last timestamp group either way.
    """
    dfg = Dfg()
    for trace in log.traces:
        for event in trace.events:
            _bump(dfg.nodes, event.activity)
        groups = same_timestamp_groups(trace)
        if not groups:
            continue
        for event in groups[0]:
            _bump(dfg.start_freq, event.activity)
        for event in groups[-1]:
            _bump(dfg.end_freq, event.activity)
        if tie_policy is TiePolicy.SKIP_TIES:
            for earlier, later in zip(groups, groups[1:]):
                for a in earlier:
                    for b in later:
                        _bump(dfg.edges, (a.activity, b.activity))
        else:
            events = trace.events
            for a, b in zip(events, events[1:]):
                _bump(dfg.edges, (a.activity, b.activity))
    return dfg


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(dfg: Dfg) -> str:
    """Graphviz text with lexicographically ordered nodes and edges.

    Output is byte-stable for equal graphs.
    """
    lines = ["digraph dfg {", "  rankdir=LR;"]
    for activity in sorted(dfg.nodes):
        label = f"{activity} ({dfg.nodes[activity]})"
        lines.append(f"  {_quote(activity)} [label={_quote(label)}];")
    for (a, b) in sorted(dfg.edges):
        lines.append(f"  {_quote(a)} -> {_quote(b)} [label=\"{dfg.edges[(a, b)]}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"
