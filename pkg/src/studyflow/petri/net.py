"""Workflow-net representation of study plans, with PNML and DOT export."""

from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass
from xml.etree import ElementTree as ET


class PetriNetError(ValueError):
    pass


@dataclass(frozen=True)
class PetriNet:
    """A plain place/transition net with weight-1 arcs.

    ``transitions`` maps transition id to its label; silent transitions carry
    ``None``. Markings are multisets over places. Construction validates arc
    endpoints and marking support; :meth:`is_workflow_net` checks the
    structural source/sink/path property.
    """

    places: frozenset[str]
    transitions: dict[str, str | None]
    arcs: frozenset[tuple[str, str]]
    initial_marking: dict[str, int]
    final_marking: dict[str, int]

    def __post_init__(self):
        overlap = self.places & self.transitions.keys()
        if overlap:
            raise PetriNetError(f"ids used as both place and transition: {sorted(overlap)}")
        for source, target in self.arcs:
            if source in self.places and target in self.transitions:
                continue
            if source in self.transitions and target in self.places:
                continue
            raise PetriNetError(f"arc does not connect a place and a transition: {(source, target)}")
        for name, marking in (("initial", self.initial_marking), ("final", self.final_marking)):
            if not marking:
                raise PetriNetError(f"{name} marking must not be empty")
            unknown = marking.keys() - self.places
            if unknown:
                raise PetriNetError(f"{name} marking over unknown places: {sorted(unknown)}")
            if any(count < 1 for count in marking.values()):
                raise PetriNetError(f"{name} marking has non-positive token counts")

    def preset(self, node: str) -> list[str]:
        return sorted(source for source, target in self.arcs if target == node)

    def postset(self, node: str) -> list[str]:
        return sorted(target for source, target in self.arcs if source == node)

    def labels(self) -> set[str]:
        return {label for label in self.transitions.values() if label is not None}

    def silent_transitions(self) -> list[str]:
        return sorted(t for t, label in self.transitions.items() if label is None)

    def is_workflow_net(self) -> bool:
        sources = [p for p in self.places if not self.preset(p)]
        sinks = [p for p in self.places if not self.postset(p)]
        if len(sources) != 1 or len(sinks) != 1:
            return False
        source, sink = sources[0], sinks[0]

        def reach(start: str, forward: bool) -> set[str]:
            seen = {start}
            frontier = [start]
            while frontier:
                node = frontier.pop()
                neighbors = self.postset(node) if forward else self.preset(node)
                for neighbor in neighbors:
                    if neighbor not in seen:
                        seen.add(neighbor)
                        frontier.append(neighbor)
            return seen

        nodes = self.places | self.transitions.keys()
        return reach(source, True) == nodes and reach(sink, False) == nodes


def marking_counter(marking: dict[str, int]) -> Counter:
    return Counter(marking)


_PNML_NS = "http://www.pnml.org/version-2009/grammar/pnml"


def export_pnml(net: PetriNet, net_id: str = "net1") -> bytes:
    """PNML 2.0 serialization with a final-markings extension block."""
    root = ET.Element("pnml", {"xmlns": _PNML_NS})
    net_el = ET.SubElement(
        root, "net", {"id": net_id, "type": "http://www.pnml.org/version-2009/grammar/ptnet"}
    )
    page = ET.SubElement(net_el, "page", {"id": "page1"})
    for place in sorted(net.places):
        place_el = ET.SubElement(page, "place", {"id": place})
        name_el = ET.SubElement(ET.SubElement(place_el, "name"), "text")
        name_el.text = place
        tokens = net.initial_marking.get(place, 0)
        if tokens:
            marking_el = ET.SubElement(ET.SubElement(place_el, "initialMarking"), "text")
            marking_el.text = str(tokens)
    for transition in sorted(net.transitions):
        trans_el = ET.SubElement(page, "transition", {"id": transition})
        label = net.transitions[transition]
        name_el = ET.SubElement(ET.SubElement(trans_el, "name"), "text")
        name_el.text = label if label is not None else ""
        if label is None:
            ET.SubElement(
                trans_el, "toolspecific",
                {"tool": "studyflow", "version": "1.0", "activity": "$invisible$"},
            )
    for index, (source, target) in enumerate(sorted(net.arcs)):
        ET.SubElement(page, "arc", {"id": f"arc{index}", "source": source, "target": target})
    finals = ET.SubElement(net_el, "finalmarkings")
    marking_el = ET.SubElement(finals, "marking")
    for place in sorted(net.final_marking):
        place_el = ET.SubElement(marking_el, "place", {"idref": place})
        text_el = ET.SubElement(place_el, "text")
        text_el.text = str(net.final_marking[place])
    tree = ET.ElementTree(root)
    ET.indent(tree)
    buffer = io.BytesIO()
    tree.write(buffer, encoding="utf-8", xml_declaration=True)
    return buffer.getvalue()


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_net_dot(net: PetriNet) -> str:
    """Inspection rendering: circles for places, boxes for transitions."""
    lines = ["digraph petrinet {", "  rankdir=LR;"]
    for place in sorted(net.places):
        tokens = net.initial_marking.get(place, 0)
        label = f"{place}" + (f" [{tokens}]" if tokens else "")
        lines.append(f"  {_quote(place)} [shape=circle, label={_quote(label)}];")
    for transition in sorted(net.transitions):
        label = net.transitions[transition]
        if label is None:
            lines.append(f"  {_quote(transition)} [shape=box, style=filled, fillcolor=black, label=\"\"];")
        else:
            lines.append(f"  {_quote(transition)} [shape=box, label={_quote(label)}];")
    for source, target in sorted(net.arcs):
        lines.append(f"  {_quote(source)} -> {_quote(target)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
