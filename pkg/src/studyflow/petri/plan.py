"""Recommended study plans and their translation into workflow nets.

A plan lists semester blocks of course ids. The net makes block courses
genuinely concurrent (AND-split per block) and blocks strictly sequential
(silent AND-join between consecutive blocks). Every course transition is
mandatory: a skipped course shows up as missing tokens during replay, which
is exactly the deviation signal the plan comparison needs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..cms import CmsDatabase
from .net import PetriNet, PetriNetError


class PlanError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class RecommendedPlan:
    program_id: str
    regulation_version: str
    semesters: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        seen: set[str] = set()
        for block in self.semesters:
            for course in block:
                if course in seen:
                    raise PlanError(f"course {course!r} appears in more than one semester block")
                seen.add(course)

    def courses(self) -> set[str]:
        return {course for block in self.semesters for course in block}

    def recommended_semester(self, course_id: str) -> int | None:
        for index, block in enumerate(self.semesters, start=1):
            if course_id in block:
                return index
        return None

    def truncated(self, max_semesters: int) -> "RecommendedPlan":
        """Plan limited to the first ``max_semesters`` blocks (observed-horizon trimming)."""
        return RecommendedPlan(
            self.program_id, self.regulation_version, self.semesters[:max_semesters]
        )

    def as_dict(self) -> dict:
        return {
            "program_id": self.program_id,
            "regulation_version": self.regulation_version,
            "semesters": [list(block) for block in self.semesters],
        }


def load_plan(source: str | Path, catalog: CmsDatabase | None = None) -> RecommendedPlan:
    """Read a plan JSON file; with a catalog, unknown plan courses are rejected."""
    raw = json.loads(Path(source).read_text(encoding="utf-8"))
    try:
        plan = RecommendedPlan(
            program_id=raw["program_id"],
            regulation_version=raw["regulation_version"],
            semesters=tuple(tuple(block) for block in raw["semesters"]),
        )
    except (KeyError, TypeError) as exc:
        raise PlanError(f"malformed plan file {source}: {exc}") from exc
    if catalog is not None:
        unknown = sorted(plan.courses() - catalog.courses.keys())
        if unknown:
            raise PlanError(f"plan references courses missing from the catalog: {unknown}")
    return plan


def plan_to_petri(plan: RecommendedPlan) -> PetriNet:
    """Workflow net with one labeled transition per course, one token flow.

    Empty blocks contribute nothing and are skipped; a plan without any
    course is rejected.
    """
    blocks = [block for block in plan.semesters if block]
    if not blocks:
        raise PlanError("plan contains no courses")

    places = {"source", "sink"}
    transitions: dict[str, str | None] = {}
    arcs: set[tuple[str, str]] = set()

    for block in blocks:
        for course in block:
            places.add(f"ready:{course}")
            places.add(f"done:{course}")
            transitions[f"take:{course}"] = course
            arcs.add((f"ready:{course}", f"take:{course}"))
            arcs.add((f"take:{course}", f"done:{course}"))

    # silent boundary i consumes the previous block's done-places (or source)
    # and produces the next block's ready-places (or sink)
    for boundary in range(len(blocks) + 1):
        silent = f"advance:{boundary}"
        transitions[silent] = None
        if boundary == 0:
            arcs.add(("source", silent))
        else:
            for course in blocks[boundary - 1]:
                arcs.add((f"done:{course}", silent))
        if boundary == len(blocks):
            arcs.add((silent, "sink"))
        else:
            for course in blocks[boundary]:
                arcs.add((silent, f"ready:{course}"))

    net = PetriNet(
        places=frozenset(places),
        transitions=transitions,
        arcs=frozenset(arcs),
        initial_marking={"source": 1},
        final_marking={"sink": 1},
    )
    if not net.is_workflow_net():  # structural guarantee of the construction
        raise PetriNetError("plan translation produced a non-workflow net")
    return net
