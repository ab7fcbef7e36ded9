"""Quality measures of space-time drawings.

Stress is read from planar slices of the cube, movement from the projected
trajectory lengths and crowding from exact closest-approach events between
linearly moving nodes. All metrics accept a scale factor; ``best_scale``
chooses it by minimising on-slice stress over ``1.1**i``.
"""

from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

SCALE_BASE = 1.1
SCALE_EXPONENTS = np.arange(-19, 20)
DEFAULT_DIAMETER = 0.2


# ---------------------------------------------------------------- positions

def run_positions(run: np.ndarray, z: np.ndarray, side: str = "right") -> np.ndarray:
    """Planar positions on one run at cube times ``z`` (inside its span).

    At a jump ``side="right"`` gives the position after it and
    ``side="left"`` the one before.
    """
    tz = run[:, 2]
    if len(run) == 1:
        return np.repeat(run[:1, :2], len(z), axis=0)
    if side == "right":
        i = np.searchsorted(tz, z, side="right") - 1
    else:
        i = np.searchsorted(tz, z, side="left") - 1
    i = np.clip(i, 0, len(run) - 2)
    p0, p1 = run[i], run[i + 1]
    dt = p1[:, 2] - p0[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(dt > 0, (z - p0[:, 2]) / dt, 1.0 if side == "right" else 0.0)
    u = np.clip(u, 0.0, 1.0)
    return p0[:, :2] + u[:, None] * (p1[:, :2] - p0[:, :2])


def node_positions(traj, z: np.ndarray, clamp: bool = True) -> np.ndarray:
    """Positions of one trajectory at cube times ``z``.

    Times not covered by any run are clamped to the nearest run end, or
    NaN when ``clamp`` is false.
    """
    z = np.asarray(z, dtype=float)
    out = np.full((len(z), 2), np.nan)
    if not traj.runs:
        return out
    covered = np.zeros(len(z), dtype=bool)
    for run in traj.runs:
        m = (z >= run[0, 2]) & (z <= run[-1, 2]) & ~covered
        if m.any():
            out[m] = run_positions(run, z[m])
            covered |= m
    if clamp and not covered.all():
        ends = np.array([(r[0, 2], r[-1, 2]) for r in traj.runs])
        firsts = np.array([r[0, :2] for r in traj.runs])
        lasts = np.array([r[-1, :2] for r in traj.runs])
        for k in np.flatnonzero(~covered):
            d0 = np.abs(ends[:, 0] - z[k])
            d1 = np.abs(ends[:, 1] - z[k])
            j0, j1 = int(np.argmin(d0)), int(np.argmin(d1))
            out[k] = firsts[j0] if d0[j0] <= d1[j1] else lasts[j1]
    return out


# ------------------------------------------------------------------- slices

def _present(ivs, t: float, dom_end) -> bool:
    for start, end in ivs:
        if start <= t < end:
            return True
        if t == end and (start == end or end == dom_end):
            return True
    return False


def present_at(graph, item, t: float) -> bool:
    """Presence on the half-open intervals ``[start, end)``; the end of the
    time domain and zero-length appearances count as present."""
    dom_end = graph.time_domain.end if graph.time_domain is not None else None
    return _present([(iv.start, iv.end) for iv in graph.appearance_intervals(item)], t, dom_end)


class PresenceTable:
    """Appearance intervals of every node and edge, extracted once."""

    def __init__(self, graph):
        self.graph = graph
        self.dom_end = graph.time_domain.end if graph.time_domain is not None else None
        self.nodes = {v: [(iv.start, iv.end) for iv in graph.appearance_intervals(v)] for v in graph.nodes}
        self.edges = {e: [(iv.start, iv.end) for iv in graph.appearance_intervals(e)] for e in graph.edges}

    def sets(self, t: float):
        nodes = [v for v, ivs in self.nodes.items() if _present(ivs, t, self.dom_end)]
        alive = set(nodes)
        edges = [e for e, ivs in self.edges.items()
                 if e[0] in alive and e[1] in alive and _present(ivs, t, self.dom_end)]
        return nodes, edges


@dataclass
class SliceGraph:
    time: float
    nodes: list
    positions: np.ndarray
    edges: list
    distances: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        if len(self.positions) != len(self.nodes):
            raise ValueError("one position per present node required")

    def position(self, node):
        return self.positions[self.nodes.index(node)]

    def quadratic(self, delta: float = 1.0):
        """Stress as ``(A, B, C, pairs)`` with stress(s) = (A s^2 - 2 B s + C) / pairs."""
        n = len(self.nodes)
        if n < 2:
            return 0.0, 0.0, 0.0, 0
        iu, ju = np.triu_indices(n, 1)
        d = self.distances[iu, ju]
        ok = np.isfinite(d) & (d > 0)
        if not ok.any():
            return 0.0, 0.0, 0.0, 0
        d = d[ok] * delta
        diff = self.positions[iu[ok]] - self.positions[ju[ok]]
        D = np.hypot(diff[:, 0], diff[:, 1])
        w = d ** -2.0
        return float(np.sum(w * D * D)), float(np.sum(w * D * d)), float(np.sum(w * d * d)), int(ok.sum())


def _graph_distances(nodes, edges) -> np.ndarray:
    n = len(nodes)
    if n == 0:
        return np.zeros((0, 0))
    code = {v: i for i, v in enumerate(nodes)}
    rows = [code[u] for u, v in edges]
    cols = [code[v] for u, v in edges]
    adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    return shortest_path(adj, directed=False, unweighted=True)


def nearest_slice(t: float, slice_times) -> float:
    """Closest slice time; a tie goes to the later slice."""
    st = np.asarray(slice_times, dtype=float)
    k = int(np.searchsorted(st, t))
    if k == 0:
        return float(st[0])
    if k == len(st):
        return float(st[-1])
    return float(st[k] if st[k] - t <= t - st[k - 1] else st[k - 1])


def _check_time(graph, t):
    dom = graph.time_domain
    if dom is not None and not dom.start <= t <= dom.end:
        raise ValueError(f"time {t} outside the domain [{dom.start}, {dom.end}]")


def _set_time(t: float, presence_mode: str, slice_times) -> float:
    if presence_mode == "d":
        if slice_times is None or not len(slice_times):
            raise ValueError("presence mode 'd' needs slice_times")
        return nearest_slice(t, slice_times)
    if presence_mode == "c":
        return t
    raise ValueError(f"presence_mode must be 'c' or 'd', got {presence_mode!r}")


def slice(drawing, graph, t: float, presence_mode: str = "c", slice_times=None,  # noqa: A001
          table: PresenceTable | None = None) -> SliceGraph:
    """Planar snapshot of the drawing at data time ``t``.

    ``"c"`` uses the appearances at exactly ``t``; ``"d"`` uses the node and
    edge sets of the nearest slice time while reading positions at ``t``.
    """
    _check_time(graph, t)
    table = table or PresenceTable(graph)
    nodes, edges = table.sets(_set_time(t, presence_mode, slice_times))
    z = np.array([t * drawing.tau])
    pos = np.array([node_positions(drawing.trajectories[v], z)[0] for v in nodes]).reshape(-1, 2)
    return SliceGraph(t, nodes, pos, edges, _graph_distances(nodes, edges))


# ------------------------------------------------------------------- stress

def stress(sl: SliceGraph, scale: float = 1.0, delta: float = 1.0) -> float:
    """Average over connected node pairs of ``d^-2 (scale * |p_u - p_v| - d)^2``."""
    A, B, C, n = sl.quadratic(delta)
    if n == 0:
        return 0.0
    return max((A * scale * scale - 2.0 * B * scale + C) / n, 0.0)


def sample_times(slice_times, samples_per_gap: int = 1) -> np.ndarray:
    """Slice times plus ``samples_per_gap`` evenly spaced times inside each gap."""
    st = np.asarray(slice_times, dtype=float)
    if len(st) < 2 or samples_per_gap <= 0:
        return st
    frac = np.arange(1, samples_per_gap + 1) / (samples_per_gap + 1)
    inner = (st[:-1, None] + frac[None, :] * np.diff(st)[:, None]).ravel()
    return np.sort(np.concatenate([st, inner]))


class StressProfile:
    """Per-slice stress quadratics so that many scales are cheap to test."""

    def __init__(self, drawing, graph, times, presence_mode: str, slice_times, table=None):
        table = table or PresenceTable(graph)
        times = np.asarray(times, dtype=float)
        for t in times:
            _check_time(graph, t)
        z = times * drawing.tau
        pos = {v: node_positions(tr, z) for v, tr in drawing.trajectories.items()}
        cache = {}
        q = []
        for k, t in enumerate(times):
            key = _set_time(float(t), presence_mode, slice_times)
            if key not in cache:
                nodes, edges = table.sets(key)
                cache[key] = (nodes, edges, _graph_distances(nodes, edges))
            nodes, edges, dist = cache[key]
            p = np.array([pos[v][k] for v in nodes]).reshape(-1, 2)
            q.append(SliceGraph(float(t), nodes, p, edges, dist).quadratic(drawing.delta))
        q = np.array(q, dtype=float).reshape(-1, 4)
        self.n = len(q)
        npairs = np.where(q[:, 3] > 0, q[:, 3], 1.0)
        self.A, self.B, self.C = (q[:, k] / npairs for k in range(3))

    def __call__(self, scale):
        if self.n == 0:
            return np.zeros_like(np.asarray(scale, dtype=float))
        s = np.asarray(scale, dtype=float)[..., None]
        per = np.maximum(self.A * s * s - 2.0 * self.B * s + self.C, 0.0)
        return per.mean(axis=-1)


def stress_aggregates(drawing, graph, slice_times, presence_mode: str = "d", scale: float = 1.0,
                      samples_per_gap: int = 1):
    """``(stress_on, stress_off)``: mean stress on slice times, and on slice
    times together with ``samples_per_gap`` samples between each pair."""
    if not len(slice_times):
        raise ValueError("slice_times must not be empty")
    table = PresenceTable(graph)
    on = StressProfile(drawing, graph, slice_times, presence_mode, slice_times, table)
    off = StressProfile(drawing, graph, sample_times(slice_times, samples_per_gap), presence_mode, slice_times, table)
    return float(on(scale)), float(off(scale))


@dataclass
class ScaleChoice:
    scale: float
    exponent: int
    interior: bool
    stress: float


def best_scale(drawing, graph, slice_times, presence_mode: str = "d") -> ScaleChoice:
    """Scale ``1.1**i``, ``-19 <= i <= 19``, with the lowest on-slice stress.

    Ties go to the exponent closest to zero.
    """
    prof = StressProfile(drawing, graph, slice_times, presence_mode, slice_times)
    scales = SCALE_BASE ** SCALE_EXPONENTS.astype(float)
    values = prof(scales)
    order = np.lexsort((np.abs(SCALE_EXPONENTS), values))
    k = int(order[0])
    i = int(SCALE_EXPONENTS[k])
    interior = SCALE_EXPONENTS[0] < i < SCALE_EXPONENTS[-1]
    return ScaleChoice(float(scales[k]), i, bool(interior), float(values[k]))


# ------------------------------------------------------- movement, crowding

def movement(drawing, scale: float = 1.0) -> float:
    """Average planar length travelled per node, jumps included."""
    trajs = list(drawing.trajectories.values())
    if not trajs:
        return 0.0
    total = 0.0
    for traj in trajs:
        for run in traj.runs:
            d = np.diff(run[:, :2], axis=0)
            total += float(np.hypot(d[:, 0], d[:, 1]).sum())
    return scale * total / len(trajs)


def _entries(r0: np.ndarray, v: np.ndarray, L: np.ndarray, diameter: float) -> np.ndarray:
    """Entries into the disc of radius ``diameter`` for relative motion
    ``r0 + s v`` with ``s`` in ``[0, L)``."""
    a = np.einsum("ij,ij->i", v, v)
    b = np.einsum("ij,ij->i", r0, v)
    c = np.einsum("ij,ij->i", r0, r0) - diameter * diameter
    disc = b * b - a * c
    ok = (a > 0) & (disc > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        root = (-b - np.sqrt(np.where(ok, disc, 0.0))) / np.where(ok, a, 1.0)
    return ok & (root >= 0) & (root < L)


def _pair_events(ru: np.ndarray, rv: np.ndarray, diameter: float) -> int:
    lo = max(ru[0, 2], rv[0, 2])
    hi = min(ru[-1, 2], rv[-1, 2])
    if not hi > lo:
        return 0
    tz = np.concatenate([ru[:, 2], rv[:, 2], [lo, hi]])
    T = np.unique(tz[(tz >= lo) & (tz <= hi)])
    t0, t1 = T[:-1], T[1:]
    start = run_positions(ru, t0, "right") - run_positions(rv, t0, "right")
    end = run_positions(ru, t1, "left") - run_positions(rv, t1, "left")
    L = t1 - t0
    r2 = diameter * diameter
    inside_start = np.einsum("ij,ij->i", start, start) < r2
    inside_end = np.einsum("ij,ij->i", end, end) < r2
    count = int(inside_start[0])
    # jumps: state can change between the end of one piece and the next start
    count += int(np.sum(~inside_end[:-1] & inside_start[1:]))
    count += int(np.sum(_entries(start, (end - start) / L[:, None], L, diameter)))
    return count


def crowding(drawing, diameter: float = DEFAULT_DIAMETER) -> int:
    """Number of times two co-present nodes come closer than ``diameter``.

    One event per crossing from outside to inside, plus one when a pair is
    already overlapping as soon as both are present.
    """
    if not diameter > 0:
        raise ValueError("diameter must be positive")
    trajs = list(drawing.trajectories.values())
    spans = [[(r[0, 2], r[-1, 2]) for r in t.runs] for t in trajs]
    total = 0
    for i in range(len(trajs)):
        for j in range(i + 1, len(trajs)):
            for a, ru in enumerate(trajs[i].runs):
                for b, rv in enumerate(trajs[j].runs):
                    if spans[i][a][1] > spans[j][b][0] and spans[j][b][1] > spans[i][a][0]:
                        total += _pair_events(ru, rv, diameter)
    return total


# ------------------------------------------------------------------ reports

@dataclass
class MetricsReport:
    stress_on_d: float = 0.0
    stress_off_d: float = 0.0
    stress_on_c: float = 0.0
    stress_off_c: float = 0.0
    movement: float = 0.0
    crowding: int = 0
    runtime_seconds: float = 0.0
    scale: float = 1.0
    scale_exponent: int = 0
    scale_interior: bool = True
    graph: str = ""
    type: str = ""
    # which stress pair the table columns show: "d" for timesliced data, "c" for continuous
    stress_mode: str = "d"

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.stress_mode not in ("c", "d"):
            raise ValueError("stress_mode must be 'c' or 'd'")

    @property
    def stress_on(self) -> float:
        return self.stress_on_c if self.stress_mode == "c" else self.stress_on_d

    @property
    def stress_off(self) -> float:
        return self.stress_off_c if self.stress_mode == "c" else self.stress_off_d

    def to_dict(self) -> dict:
        return asdict(self)

    def row(self) -> dict:
        head = {
            "graph": self.graph,
            "type": self.type,
            "time": self.runtime_seconds,
            "scale": self.scale,
            "stress_on": self.stress_on,
            "stress_off": self.stress_off,
            "movement": self.movement,
            "crowding": self.crowding,
        }
        extra = {k: v for k, v in self.to_dict().items() if k not in ("graph", "type", "runtime_seconds", "scale",
                                                                     "movement", "crowding")}
        return {**head, **extra}


CSV_COLUMNS = list(MetricsReport().row())


def full_report(drawing, graph, slice_times, runtime_seconds: float = 0.0, samples_per_gap: int = 1,
                diameter: float = DEFAULT_DIAMETER, stress_mode: str = "d", scale: float | None = None,
                graph_name: str = "", type_name: str = "") -> MetricsReport:
    """Choose the scale by on-slice stress (d), then evaluate every metric
    at that scale. A given ``scale`` skips the search. Crowding uses a node
    diameter in scaled units."""
    rep = MetricsReport(runtime_seconds=float(runtime_seconds), graph=graph_name, type=type_name,
                        stress_mode=stress_mode)
    if not drawing.trajectories or not len(slice_times):
        return rep
    if scale is None:
        choice = best_scale(drawing, graph, slice_times, "d")
        rep.scale, rep.scale_exponent, rep.scale_interior = choice.scale, choice.exponent, choice.interior
    else:
        if not scale > 0:
            raise ValueError("scale must be positive")
        rep.scale = float(scale)
        rep.scale_exponent = int(round(np.log(scale) / np.log(SCALE_BASE)))
    s = rep.scale
    rep.stress_on_d, rep.stress_off_d = stress_aggregates(drawing, graph, slice_times, "d", s, samples_per_gap)
    rep.stress_on_c, rep.stress_off_c = stress_aggregates(drawing, graph, slice_times, "c", s, samples_per_gap)
    rep.movement = movement(drawing, s)
    rep.crowding = crowding(drawing, diameter / s)
    return rep


def reports_to_csv(reports, fh=None) -> str:
    buf = fh or _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue() if fh is None else ""


def reports_to_json(reports) -> str:
    # the CSV row plus every stored field, so the selected stress pair is present
    return json.dumps([{**r.to_dict(), **r.row()} for r in reports], indent=2, sort_keys=True)
