"""Continuous dynamic graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .intervals import (
    ConstantPiece,
    PiecewiseAttribute,
    TimeInterval,
    intersect_lists,
    merge_intervals,
    subtract,
    true_intervals,
)

NodeId = Hashable
Edge = tuple

ORIGIN = (0.0, 0.0)


def appearance_from_intervals(intervals: Iterable[TimeInterval]) -> PiecewiseAttribute:
    return PiecewiseAttribute(
        ((iv, ConstantPiece(True)) for iv in merge_intervals(intervals)), default=False
    )


def canonical_edge(u, v) -> Edge:
    """Undirected edge key with a stable endpoint order."""
    return (u, v) if _key(u) <= _key(v) else (v, u)


def _key(x):
    return (type(x).__name__, x)


@dataclass(frozen=True)
class Violation:
    edge: Edge
    interval: TimeInterval
    missing: tuple

    def __str__(self):
        who = ", ".join(map(str, self.missing))
        return f"edge {self.edge} present on {self.interval!r} without node(s) {who}"


class ValidationError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  {v}" for v in self.violations[:20])
        more = f"\n  ... {len(self.violations) - 20} more" if len(self.violations) > 20 else ""
        super().__init__(f"{len(self.violations)} edge coverage violation(s):\n{lines}{more}")


@dataclass
class ContinuousDynamicGraph:
    """Nodes and edges whose position, label and appearance depend on time.

    Missing attributes get defaults: position ``(0, 0)`` everywhere, an
    empty label, and no appearance.
    """

    nodes: list
    edges: list
    node_appearance: dict = field(default_factory=dict)
    edge_appearance: dict = field(default_factory=dict)
    position: dict = field(default_factory=dict)
    label: dict = field(default_factory=dict)
    time_domain: TimeInterval | None = None

    def __post_init__(self):
        self.nodes = list(dict.fromkeys(self.nodes))
        self.edges = [tuple(e) for e in dict.fromkeys(tuple(e) for e in self.edges)]
        known = set(self.nodes)
        for u, v in self.edges:
            if u not in known or v not in known:
                raise KeyError(f"edge ({u!r}, {v!r}) references an unknown node")
        for n in self.nodes:
            self.node_appearance.setdefault(n, PiecewiseAttribute(default=False))
            self.position.setdefault(n, PiecewiseAttribute(default=ORIGIN))
            self.label.setdefault(n, PiecewiseAttribute(default=""))
        for e in self.edges:
            self.edge_appearance.setdefault(e, PiecewiseAttribute(default=False))
        if self.time_domain is None:
            self.time_domain = self._appearance_hull()

    @classmethod
    def from_intervals(
        cls,
        node_intervals: Mapping[NodeId, Iterable[TimeInterval]],
        edge_intervals: Mapping[Edge, Iterable[TimeInterval]] = {},
        positions: Mapping[NodeId, PiecewiseAttribute] | None = None,
        labels: Mapping[NodeId, PiecewiseAttribute] | None = None,
        time_domain: TimeInterval | None = None,
    ) -> "ContinuousDynamicGraph":
        nodes = list(node_intervals)
        return cls(
            nodes=nodes,
            edges=list(edge_intervals),
            node_appearance={n: appearance_from_intervals(ivs) for n, ivs in node_intervals.items()},
            edge_appearance={e: appearance_from_intervals(ivs) for e, ivs in edge_intervals.items()},
            position=dict(positions or {}),
            label=dict(labels or {}),
            time_domain=time_domain,
        )

    def _appearance_hull(self) -> TimeInterval | None:
        hull = None
        for attr in list(self.node_appearance.values()) + list(self.edge_appearance.values()):
            for iv in true_intervals(attr):
                hull = iv if hull is None else hull.hull(iv)
        if hull is None:
            return None
        return TimeInterval.closed(hull.start, hull.end)

    def appearance_intervals(self, item) -> list[TimeInterval]:
        """Maximal intervals where a node (by id) or an edge (by pair) is present."""
        if item in self.node_appearance:
            return true_intervals(self.node_appearance[item])
        if isinstance(item, tuple) and item in self.edge_appearance:
            return true_intervals(self.edge_appearance[item])
        raise KeyError(f"unknown node or edge {item!r}")

    def is_present(self, item, t: float) -> bool:
        attr = self.node_appearance.get(item)
        if attr is None:
            attr = self.edge_appearance[item]
        return bool(attr.value_at(t))

    def position_at(self, node, t: float):
        return self.position[node].value_at(t)

    def label_at(self, node, t: float):
        return self.label[node].value_at(t)

    def __len__(self):
        return len(self.nodes)


def appearance_intervals(graph: ContinuousDynamicGraph, item) -> list[TimeInterval]:
    return graph.appearance_intervals(item)


def validate(graph: ContinuousDynamicGraph) -> list[Violation]:
    """Every stretch of edge presence not covered by both endpoint nodes.

    An empty list means the graph is valid.
    """
    report = []
    for e in graph.edges:
        u, v = e
        iu = graph.appearance_intervals(u)
        iv = graph.appearance_intervals(v)
        both = intersect_lists(iu, iv)
        for piece in graph.appearance_intervals(e):
            for gap in subtract(piece, both):
                missing = tuple(
                    n for n, ivs in ((u, iu), (v, iv)) if subtract(gap, ivs)
                )
                report.append(Violation(e, gap, missing))
    return report


def ensure_valid(graph: ContinuousDynamicGraph) -> None:
    report = validate(graph)
    if report:
        raise ValidationError(report)
