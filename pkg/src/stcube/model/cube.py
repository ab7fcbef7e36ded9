"""Space-time cube embedding of continuous dynamic graphs.

Each node becomes a :class:`Trajectory`: one polyline ("run") per maximal
appearance interval, with control points ``(x, y, t * tau)``. Inside a run
the time coordinate never decreases. Two consecutive points may share a
time coordinate only where the position attribute jumps; such a link is a
*jump* and is not a segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import ContinuousDynamicGraph, appearance_from_intervals, ensure_valid
from .intervals import LinearPiece, PiecewiseAttribute, TimeInterval


class MonotonicityError(ValueError):
    def __init__(self, node, run, link):
        self.node, self.run, self.link = node, run, link
        super().__init__(
            f"trajectory of node {node!r}, run {run}: segment {link} goes back in time "
            "(node would have several positions at once)"
        )


@dataclass
class Trajectory:
    node: object
    runs: list = field(default_factory=list)

    def __post_init__(self):
        self.runs = [np.asarray(r, dtype=float).reshape(-1, 3) for r in self.runs]

    def check_monotone(self) -> None:
        for ri, run in enumerate(self.runs):
            bad = np.flatnonzero(np.diff(run[:, 2]) < 0)
            if bad.size:
                raise MonotonicityError(self.node, ri, int(bad[0]))
        for ri in range(1, len(self.runs)):
            if self.runs[ri][0, 2] < self.runs[ri - 1][-1, 2]:
                raise ValueError(f"runs {ri - 1} and {ri} of node {self.node!r} overlap in time")

    def segments(self):
        """Yield ``(run_index, link_index, p0, p1)`` for every non-jump link."""
        for ri, run in enumerate(self.runs):
            for j in range(len(run) - 1):
                if run[j + 1, 2] > run[j, 2]:
                    yield ri, j, run[j], run[j + 1]

    @property
    def n_points(self) -> int:
        return sum(len(r) for r in self.runs)

    def copy(self) -> "Trajectory":
        return Trajectory(self.node, [r.copy() for r in self.runs])


@dataclass
class SpaceTimeDrawing:
    trajectories: dict
    tau: float = 1.0
    delta: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    @property
    def nodes(self):
        return list(self.trajectories)

    def copy(self) -> "SpaceTimeDrawing":
        return SpaceTimeDrawing(
            {n: tr.copy() for n, tr in self.trajectories.items()}, self.tau, self.delta, dict(self.meta)
        )

    def check(self) -> None:
        for tr in self.trajectories.values():
            tr.check_monotone()

    def scaled(self, factor: float) -> "SpaceTimeDrawing":
        """Copy with the two spatial coordinates multiplied by ``factor``."""
        out = self.copy()
        for tr in out.trajectories.values():
            for r in tr.runs:
                r[:, :2] *= factor
        return out

    def position_at(self, node, t: float):
        """Planar position of ``node`` at data time ``t`` or None when absent."""
        tr = self.trajectories.get(node)
        if tr is None:
            return None
        z = t * self.tau
        for run in tr.runs:
            if run[0, 2] <= z <= run[-1, 2]:
                return _interp_run(run, z)
        return None


def _interp_run(run: np.ndarray, z: float) -> np.ndarray:
    if len(run) == 1:
        return run[0, :2].copy()
    # side="right" picks the piece after a jump
    j = int(np.searchsorted(run[:, 2], z, side="right")) - 1
    j = min(max(j, 0), len(run) - 2)
    t0, t1 = run[j, 2], run[j + 1, 2]
    if t1 == t0:
        return run[j + 1, :2].copy()
    f = (z - t0) / (t1 - t0)
    return run[j, :2] + f * (run[j + 1, :2] - run[j, :2])


def _governing(attr: PiecewiseAttribute, t0: float, t1: float):
    """The piece function that rules the open interval (t0, t1)."""
    i = attr.find(0.5 * (t0 + t1))
    if i < 0:
        return None, None
    return attr.pieces[i]


def _value(attr, iv, fn, t):
    if fn is None:
        return tuple(float(x) for x in attr.default)
    return tuple(float(x) for x in fn(iv, t))


def node_runs(graph: ContinuousDynamicGraph, node, tau: float = 1.0) -> list[np.ndarray]:
    attr = graph.position[node]
    cuts = attr.breakpoints()
    runs = []
    for app in graph.appearance_intervals(node):
        s, e = app.start, app.end
        if s == e:
            i = attr.find(s)
            val = _value(attr, *(attr.pieces[i] if i >= 0 else (None, None)), s)
            runs.append(np.array([[val[0], val[1], s * tau]]))
            continue
        times = [s] + [c for c in cuts if s < c < e] + [e]
        pts: list[tuple] = []
        for t0, t1 in zip(times, times[1:]):
            iv, fn = _governing(attr, t0, t1)
            v0 = _value(attr, iv, fn, t0)
            v1 = _value(attr, iv, fn, t1)
            if not pts or pts[-1][:2] != v0:
                pts.append((v0[0], v0[1], t0 * tau))
            pts.append((v1[0], v1[1], t1 * tau))
        runs.append(np.array(pts, dtype=float))
    return runs


def stct(graph: ContinuousDynamicGraph, tau: float = 1.0, delta: float = 1.0) -> SpaceTimeDrawing:
    """Embed ``graph`` in the space-time cube.

    Raises :class:`~stcube.model.graph.ValidationError` if an edge is present
    while one of its endpoints is not.
    """
    ensure_valid(graph)
    trajectories = {n: Trajectory(n, node_runs(graph, n, tau)) for n in graph.nodes}
    return SpaceTimeDrawing(trajectories, tau=tau, delta=delta)


def stct_inverse(drawing: SpaceTimeDrawing, graph: ContinuousDynamicGraph | None = None):
    """Rebuild position and appearance attributes from trajectories.

    With ``graph`` given, its edges, labels and time domain are kept and
    only node positions and appearances are replaced.
    """
    positions, appearances = {}, {}
    for node, tr in drawing.trajectories.items():
        tr.check_monotone()
        pieces, spans = [], []
        for run in tr.runs:
            t = run[:, 2] / drawing.tau
            spans.append(TimeInterval.closed(t[0], t[-1]))
            if len(run) == 1:
                pieces.append((TimeInterval.closed(t[0], t[0]), LinearPiece(run[0, :2], run[0, :2])))
                continue
            first = True
            for j in range(len(run) - 1):
                if t[j + 1] <= t[j]:
                    continue
                iv = TimeInterval(t[j], t[j + 1], first, True)
                pieces.append((iv, LinearPiece(run[j, :2], run[j + 1, :2])))
                first = False
        positions[node] = PiecewiseAttribute(pieces, default=(0.0, 0.0))
        appearances[node] = appearance_from_intervals(spans)

    if graph is None:
        return ContinuousDynamicGraph(
            nodes=list(drawing.trajectories), edges=[], node_appearance=appearances, position=positions
        )
    return ContinuousDynamicGraph(
        nodes=list(graph.nodes),
        edges=list(graph.edges),
        node_appearance={**graph.node_appearance, **appearances},
        edge_appearance=dict(graph.edge_appearance),
        position={**graph.position, **positions},
        label=dict(graph.label),
        time_domain=graph.time_domain,
    )
