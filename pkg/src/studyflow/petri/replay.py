"""Token replay of traces against de-jure plan nets.

The replay loop is the hottest path in the package (conformance sweeps
replay thousands of traces), so the kernel exists twice: a Cython extension
and a pure-Python fallback with identical semantics. The compiled kernel is
preferred at import time; set STUDYFLOW_PURE_PYTHON=1 to force the fallback.
benchmarks/bench_replay.py compares the two.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from ..eventlog import EventFilter, EventLog, Trace, filter_events
from .net import PetriNet

if os.environ.get("STUDYFLOW_PURE_PYTHON"):
    from . import _kernel as _backend

    KERNEL_BACKEND = "python"
else:
    try:
        from . import _kernel_c as _backend  # type: ignore[attr-defined]

        KERNEL_BACKEND = "cython"
    except ImportError:
        from . import _kernel as _backend

        KERNEL_BACKEND = "python"


@dataclass(frozen=True, slots=True)
class EncodedNet:
    """Index-encoded net shared by both replay kernels."""

    net: PetriNet
    place_names: tuple[str, ...]
    transition_names: tuple[str, ...]
    trans_inputs: list[tuple[int, ...]]
    trans_outputs: list[tuple[int, ...]]
    silent_ids: tuple[int, ...]
    label_candidates: dict[str, tuple[int, ...]]
    initial: tuple[int, ...]
    final: tuple[int, ...]


def encode_net(net: PetriNet) -> EncodedNet:
    place_names = tuple(sorted(net.places))
    place_index = {name: i for i, name in enumerate(place_names)}
    transition_names = tuple(sorted(net.transitions))
    trans_index = {name: i for i, name in enumerate(transition_names)}

    trans_inputs: list[tuple[int, ...]] = [() for _ in transition_names]
    trans_outputs: list[tuple[int, ...]] = [() for _ in transition_names]
    inputs: dict[int, list[int]] = {i: [] for i in range(len(transition_names))}
    outputs: dict[int, list[int]] = {i: [] for i in range(len(transition_names))}
    for source, target in sorted(net.arcs):
        if source in place_index:
            inputs[trans_index[target]].append(place_index[source])
        else:
            outputs[trans_index[source]].append(place_index[target])
    for tid in inputs:
        trans_inputs[tid] = tuple(sorted(inputs[tid]))
        trans_outputs[tid] = tuple(sorted(outputs[tid]))

    label_candidates: dict[str, list[int]] = {}
    for name, label in net.transitions.items():
        if label is not None:
            label_candidates.setdefault(label, []).append(trans_index[name])

    def marking_vector(marking: dict[str, int]) -> tuple[int, ...]:
        vector = [0] * len(place_names)
        for place, count in marking.items():
            vector[place_index[place]] = count
        return tuple(vector)

    return EncodedNet(
        net=net,
        place_names=place_names,
        transition_names=transition_names,
        trans_inputs=trans_inputs,
        trans_outputs=trans_outputs,
        silent_ids=tuple(
            sorted(trans_index[name] for name, label in net.transitions.items() if label is None)
        ),
        label_candidates={label: tuple(sorted(tids)) for label, tids in label_candidates.items()},
        initial=marking_vector(net.initial_marking),
        final=marking_vector(net.final_marking),
    )


@dataclass(frozen=True, slots=True)
class ReplayResult:
    case_id: tuple[str, str] | None
    produced: int
    consumed: int
    missing: int
    remaining: int
    fitness: Fraction
    missing_detail: dict[str, int]
    remaining_detail: dict[str, int]
    unknown_activities: int

    @property
    def fitting(self) -> bool:
        return self.missing == 0 and self.remaining == 0

    def as_dict(self) -> dict:
        return {
            "case_id": list(self.case_id) if self.case_id else None,
            "produced": self.produced,
            "consumed": self.consumed,
            "missing": self.missing,
            "remaining": self.remaining,
            "fitness": float(self.fitness),
            "missing_detail": dict(sorted(self.missing_detail.items())),
            "remaining_detail": dict(sorted(self.remaining_detail.items())),
            "unknown_activities": self.unknown_activities,
        }


def fitness_from_counts(missing: int, consumed: int, remaining: int, produced: int) -> Fraction:
    """The token-replay fitness 1/2(1 - m/c) + 1/2(1 - r/p), exact."""
    return Fraction(1, 2) * (1 - Fraction(missing, consumed)) + Fraction(1, 2) * (
        1 - Fraction(remaining, produced)
    )


def _replay_encoded(encoded: EncodedNet, activities: list[str], case_id) -> ReplayResult:
    events = []
    unknown = 0
    for activity in activities:
        candidates = encoded.label_candidates.get(activity)
        if candidates is None:
            unknown += 1  # log-only move: outside the model, not a missing token
        else:
            events.append(candidates)
    produced, consumed, missing, remaining, missing_per_transition, leftover = (
        _backend.replay_sequence(
            len(encoded.place_names),
            encoded.trans_inputs,
            encoded.trans_outputs,
            encoded.silent_ids,
            encoded.initial,
            encoded.final,
            events,
        )
    )
    missing_detail: dict[str, int] = {}
    for tid, count in enumerate(missing_per_transition):
        if count:
            label = encoded.net.transitions[encoded.transition_names[tid]]
            key = label if label is not None else encoded.transition_names[tid]
            missing_detail[key] = missing_detail.get(key, 0) + count
    remaining_detail = {
        encoded.place_names[place]: count for place, count in enumerate(leftover) if count
    }
    return ReplayResult(
        case_id=case_id,
        produced=produced,
        consumed=consumed,
        missing=missing,
        remaining=remaining,
        fitness=fitness_from_counts(missing, consumed, remaining, produced),
        missing_detail=missing_detail,
        remaining_detail=remaining_detail,
        unknown_activities=unknown,
    )


def token_replay(net: PetriNet | EncodedNet, trace: Trace | list[str]) -> ReplayResult:
    """Replay one trace; accepts an event-log trace or a bare activity list."""
    encoded = net if isinstance(net, EncodedNet) else encode_net(net)
    if isinstance(trace, Trace):
        return _replay_encoded(encoded, trace.activities(), trace.case_id)
    return _replay_encoded(encoded, list(trace), None)


@dataclass(frozen=True, slots=True)
class ReplayAggregate:
    trace_count: int
    fitting_traces: int
    mean_fitness: Fraction | None
    missing_by_course: dict[str, int]

    def as_dict(self) -> dict:
        return {
            "trace_count": self.trace_count,
            "fitting_traces": self.fitting_traces,
            "mean_fitness": float(self.mean_fitness) if self.mean_fitness is not None else None,
            "missing_by_course": dict(sorted(self.missing_by_course.items())),
        }


def replay_log(
    net: PetriNet, log: EventLog, mode: EventFilter = EventFilter.ALL
) -> tuple[list[ReplayResult], ReplayAggregate]:
    """Replay every trace of the (re-filtered) log and aggregate the outcome."""
    encoded = encode_net(net)
    filtered = filter_events(log, mode)
    results = [token_replay(encoded, trace) for trace in filtered.traces]
    missing_by_course: dict[str, int] = {}
    for result in results:
        for course, count in result.missing_detail.items():
            missing_by_course[course] = missing_by_course.get(course, 0) + count
    mean = (
        sum((result.fitness for result in results), Fraction(0)) / len(results)
        if results
        else None
    )
    aggregate = ReplayAggregate(
        trace_count=len(results),
        fitting_traces=sum(1 for result in results if result.fitting),
        mean_fitness=mean,
        missing_by_course=missing_by_course,
    )
    return results, aggregate


def deviation_summary(results: list[ReplayResult]) -> list[tuple[str, int, int]]:
    """Courses ranked by total missing tokens (descending, ties lexicographic).

    Each entry is (course_id, missing_count, number of traces affected);
    courses that never missed a token are omitted.
    """
    totals: dict[str, int] = {}
    trace_counts: dict[str, int] = {}
    for result in results:
        for course, count in result.missing_detail.items():
            totals[course] = totals.get(course, 0) + count
            trace_counts[course] = trace_counts.get(course, 0) + 1
    return sorted(
        ((course, totals[course], trace_counts[course]) for course in totals),
        key=lambda item: (-item[1], item[0]),
    )
