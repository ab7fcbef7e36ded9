"""Flat array view of a drawing used by the force computations."""

from __future__ import annotations

import numpy as np

from ..model.cube import SpaceTimeDrawing


class Frame:
    """All control points of a drawing stacked into one ``(n, 3)`` array.

    Attributes
    ----------
    pts : control points, node-major, runs and points in time order
    owner : node code of each point
    seg : ``(s, 2)`` point indices of every segment (links with dt > 0)
    prev, next : neighbour within the same jump-free piece, or -1
    pinned : points whose time coordinate must not change
    active : points of runs with at least two control points
    """

    def __init__(self, drawing: SpaceTimeDrawing, pin_all_times: bool = False):
        self.drawing = drawing
        self.nodes = list(drawing.trajectories)
        self.code = {n: i for i, n in enumerate(self.nodes)}
        chunks, owner, run_id, self.run_slices = [], [], [], []
        start = 0
        for k, node in enumerate(self.nodes):
            for ri, run in enumerate(drawing.trajectories[node].runs):
                chunks.append(run)
                owner.append(np.full(len(run), k, dtype=np.int64))
                run_id.append(np.full(len(run), len(self.run_slices), dtype=np.int64))
                self.run_slices.append((node, ri, start, start + len(run)))
                start += len(run)
        n = start
        self.pts = np.vstack(chunks).astype(float) if chunks else np.zeros((0, 3))
        self.owner = np.concatenate(owner) if owner else np.zeros(0, dtype=np.int64)
        run_id = np.concatenate(run_id) if run_id else np.zeros(0, dtype=np.int64)
        self.run_id = run_id

        same_run = run_id[1:] == run_id[:-1]
        dt = np.diff(self.pts[:, 2]) if n else np.zeros(0)
        link = same_run & (dt > 0)
        jump = same_run & (dt == 0)
        i = np.flatnonzero(link)
        self.seg = np.ascontiguousarray(np.column_stack([i, i + 1]).astype(np.int64)).reshape(-1, 2)
        self.seg_owner = self.owner[self.seg[:, 0]]

        self.prev = np.full(n, -1, dtype=np.int64)
        self.next = np.full(n, -1, dtype=np.int64)
        self.next[i] = i + 1
        self.prev[i + 1] = i

        run_len = np.bincount(run_id, minlength=len(self.run_slices)) if n else np.zeros(0, dtype=np.int64)
        self.active = run_len[run_id] >= 2 if n else np.zeros(0, dtype=bool)
        self.pinned = np.ones(n, dtype=bool) if pin_all_times else (self.prev < 0) | (self.next < 0)
        j = np.flatnonzero(jump)
        self.pinned[j] = True
        self.pinned[j + 1] = True

        # segments are sorted per node, so each node owns one contiguous block
        counts = np.bincount(self.seg_owner, minlength=len(self.nodes))
        ends = np.cumsum(counts)
        self.node_seg = np.column_stack([ends - counts, ends]).astype(np.int64)

    def __len__(self):
        return len(self.pts)

    def zeros(self) -> np.ndarray:
        return np.zeros_like(self.pts)

    def write_back(self, pts=None) -> None:
        """Copy (possibly moved) control points into the drawing's runs."""
        pts = self.pts if pts is None else pts
        for node, ri, s, e in self.run_slices:
            self.drawing.trajectories[node].runs[ri] = pts[s:e].copy()

    def split(self, values: np.ndarray) -> dict:
        """Per-run slices of a per-point array keyed by ``(node, run)``."""
        return {(node, ri): values[s:e].copy() for node, ri, s, e in self.run_slices}
