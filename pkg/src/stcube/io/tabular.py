"""CSV ingestion of timesliced and event-based dynamic graphs."""

from __future__ import annotations

import csv
import math
from datetime import datetime, timezone

import numpy as np

from ..model.graph import ContinuousDynamicGraph, canonical_edge
from ..model.intervals import ConstantPiece, PiecewiseAttribute, TimeInterval, merge_intervals

DEFAULT_WINDOW = 3600.0


class ParseError(ValueError):
    def __init__(self, path, line, msg):
        self.path, self.line = path, line
        super().__init__(f"{path}:{line}: {msg}")


def _rows(path, required, optional=()):
    """Yield ``(line_number, row_dict)`` from a headed CSV, skipping blanks
    and ``#`` comments."""
    with open(path, newline="") as fh:
        lines = [(i + 1, ln) for i, ln in enumerate(fh) if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError(path, 1, "empty file")
    header_line, header = lines[0]
    cols = [c.strip().lower() for c in next(csv.reader([header]))]
    missing = [c for c in required if c not in cols]
    if missing:
        raise ParseError(path, header_line, f"missing column(s) {missing}; got {cols}")
    unknown = [c for c in cols if c not in required and c not in optional]
    if unknown:
        raise ParseError(path, header_line, f"unknown column(s) {unknown}")
    for num, ln in lines[1:]:
        vals = next(csv.reader([ln]))
        if len(vals) > len(cols):
            raise ParseError(path, num, f"expected at most {len(cols)} fields, got {len(vals)}")
        vals = [v.strip() for v in vals] + [""] * (len(cols) - len(vals))
        yield num, dict(zip(cols, vals))


def parse_time(text: str) -> float:
    """Seconds from a number or an ISO 8601 timestamp (naive means UTC)."""
    try:
        return float(text)
    except ValueError:
        pass
    ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.timestamp()


# ------------------------------------------------------------- timesliced

def slice_cells(slice_times) -> list[TimeInterval]:
    """Interval owned by each slice: half the gap to each neighbour,
    clipped to the first and last slice times."""
    st = np.asarray(slice_times, dtype=float)
    if len(st) == 0:
        return []
    mids = (st[1:] + st[:-1]) / 2.0
    lo = np.concatenate([[st[0]], mids])
    hi = np.concatenate([mids, [st[-1]]])
    return [TimeInterval.closed(a, b) for a, b in zip(lo, hi)]


def from_slices(slice_times, node_sets, edge_sets) -> ContinuousDynamicGraph:
    """Graph whose elements occupy the cells of the slices they appear on."""
    st = [float(t) for t in slice_times]
    if any(b <= a for a, b in zip(st, st[1:])):
        raise ValueError("slice times must be strictly increasing")
    cells = slice_cells(st)
    node_iv, edge_iv = {}, {}
    for cell, nodes, edges in zip(cells, node_sets, edge_sets):
        for u, v in edges:
            e = canonical_edge(u, v)
            edge_iv.setdefault(e, []).append(cell)
            for w in e:
                node_iv.setdefault(w, [])
            nodes = set(nodes) | {u, v}
        for n in nodes:
            node_iv.setdefault(n, []).append(cell)
    dom = TimeInterval.closed(st[0], st[-1]) if st else None
    return ContinuousDynamicGraph.from_intervals(node_iv, edge_iv, time_domain=dom)


def load_discrete(path):
    """Read a ``slice,source,target`` CSV.

    Rows with an empty target only mark the source as present. Returns the
    graph and the sorted slice times.
    """
    per_slice = {}
    for num, row in _rows(path, ("slice", "source", "target")):
        try:
            t = float(row["slice"])
        except ValueError:
            raise ParseError(path, num, f"bad slice time {row['slice']!r}") from None
        if not math.isfinite(t):
            raise ParseError(path, num, "slice time must be finite")
        src, dst = row["source"], row["target"]
        if not src:
            raise ParseError(path, num, "empty source")
        if src == dst:
            raise ParseError(path, num, f"self loop on {src!r}")
        nodes, edges = per_slice.setdefault(t, (set(), set()))
        nodes.add(src)
        if dst:
            nodes.add(dst)
            edges.add(canonical_edge(src, dst))
    if not per_slice:
        raise ParseError(path, 1, "no data rows")
    st = sorted(per_slice)
    graph = from_slices(st, [per_slice[t][0] for t in st], [sorted(per_slice[t][1]) for t in st])
    return graph, st


def discretize(graph: ContinuousDynamicGraph, slice_times) -> ContinuousDynamicGraph:
    """Project a continuous graph onto slices: an element is on slice ``i``
    when it appears anywhere in that slice's cell."""
    st = np.asarray(slice_times, dtype=float)
    cells = slice_cells(st)
    if len(st) > 1:
        # outer cells reach half a gap beyond the first and last slice
        g0, g1 = st[1] - st[0], st[-1] - st[-2]
        cells[0] = TimeInterval.closed(st[0] - g0 / 2, cells[0].end)
        cells[-1] = TimeInterval.closed(cells[-1].start, st[-1] + g1 / 2)

    def hits(item):
        ivs = graph.appearance_intervals(item)
        return [any(iv.overlaps(c) for iv in ivs) for c in cells]

    node_hits = {n: hits(n) for n in graph.nodes}
    edge_hits = {e: hits(e) for e in graph.edges}
    node_sets = [{n for n, h in node_hits.items() if h[i]} for i in range(len(st))]
    edge_sets = [[e for e, h in edge_hits.items() if h[i]] for i in range(len(st))]
    return from_slices(st, node_sets, edge_sets)


# ----------------------------------------------------------------- events

def load_events(path, window: float = DEFAULT_WINDOW, nodes=None) -> ContinuousDynamicGraph:
    """Read a ``time,source,target[,duration][,label]`` event log.

    An event without duration keeps the edge present for ``window`` centred
    on its time; with a duration it spans ``[time, time + duration]``. Rows
    with an empty target concern the source node only. A node is present
    from its first to its last window. A label applies to the source node
    from the event time on. ``nodes`` restricts the allowed ids.
    """
    if not window >= 0:
        raise ValueError("window must be >= 0")
    allowed = None if nodes is None else set(nodes)
    node_windows, edge_windows, labels = {}, {}, {}
    for num, row in _rows(path, ("time", "source", "target"), ("duration", "label")):
        try:
            t = parse_time(row["time"])
        except ValueError:
            raise ParseError(path, num, f"bad time {row['time']!r}") from None
        dur = row.get("duration", "")
        try:
            dur = float(dur) if dur else None
        except ValueError:
            raise ParseError(path, num, f"bad duration {dur!r}") from None
        if dur is not None and not dur >= 0:
            raise ParseError(path, num, "duration must be >= 0")
        src, dst = row["source"], row["target"]
        if not src:
            raise ParseError(path, num, "empty source")
        if src == dst:
            raise ParseError(path, num, f"edge endpoints must differ, got {src!r} twice")
        if allowed is not None:
            for w in (src, dst):
                if w and w not in allowed:
                    raise ParseError(path, num, f"unknown id {w!r}")
        iv = TimeInterval.closed(t, t + dur) if dur is not None else TimeInterval.closed(t - window / 2, t + window / 2)
        ends = (src, dst) if dst else (src,)
        for w in ends:
            node_windows.setdefault(w, []).append(iv)
        if dst:
            edge_windows.setdefault(canonical_edge(src, dst), []).append(iv)
        if row.get("label"):
            labels.setdefault(src, []).append((t, row["label"]))
    node_iv = {n: [TimeInterval.closed(min(i.start for i in ivs), max(i.end for i in ivs))]
               for n, ivs in node_windows.items()}
    edge_iv = {e: merge_intervals(ivs) for e, ivs in edge_windows.items()}
    label_attr = {n: _label_attribute(v, node_iv[n][0]) for n, v in labels.items()}
    return ContinuousDynamicGraph.from_intervals(node_iv, edge_iv, labels=label_attr)


def _label_attribute(changes, span: TimeInterval) -> PiecewiseAttribute:
    changes = sorted(changes, key=lambda c: c[0])
    pieces = []
    for k, (t, text) in enumerate(changes):
        t0 = span.start if k == 0 else t
        if k + 1 < len(changes):
            t1 = changes[k + 1][0]
            if t1 > t0:
                pieces.append((TimeInterval.half_open(t0, t1), ConstantPiece(text)))
        else:
            pieces.append((TimeInterval.closed(t0, max(span.end, t0)), ConstantPiece(text)))
    return PiecewiseAttribute(pieces, default="")
