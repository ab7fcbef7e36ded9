"""Proximity index over trajectory segments.

Two levels: a centered interval tree over the time spans of the segments,
then an axis-aligned bounding-box test on all three coordinates. Queries
are conservative: they may return segments farther than the radius, never
miss a closer one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model.intervals import TimeInterval

LEAF_SIZE = 48


@dataclass(frozen=True)
class SegmentRecord:
    node: object
    run: int
    segment: int
    p0: tuple
    p1: tuple
    time_span: TimeInterval = field(init=False)
    bbox: tuple = field(init=False)

    def __post_init__(self):
        p0 = tuple(float(x) for x in self.p0)
        p1 = tuple(float(x) for x in self.p1)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "time_span", TimeInterval.closed(min(p0[2], p1[2]), max(p0[2], p1[2])))
        lo = tuple(min(a, b) for a, b in zip(p0, p1))
        hi = tuple(max(a, b) for a, b in zip(p0, p1))
        object.__setattr__(self, "bbox", (lo, hi))


def records_from_drawing(drawing) -> list[SegmentRecord]:
    out = []
    for node, tr in drawing.trajectories.items():
        for ri, j, a, b in tr.segments():
            out.append(SegmentRecord(node, ri, j, a, b))
    return out


class _TreeNode:
    __slots__ = ("pivot", "bucket", "bucket_x", "width", "left", "right")

    def __init__(self, ids, lo, hi):
        # secondary level: bucket sorted by lower x bound, plus the widest
        # x extent, so an x window selects a contiguous run of candidates
        o = np.argsort(lo[ids, 0], kind="stable")
        self.bucket = ids[o]
        self.bucket_x = lo[self.bucket, 0]
        self.width = float((hi[ids, 0] - lo[ids, 0]).max()) if ids.size else 0.0
        self.pivot = None
        self.left = self.right = None


def _build(ids, lo, hi):
    t0, t1 = lo[:, 2], hi[:, 2]
    if ids.size <= LEAF_SIZE:
        return _TreeNode(ids, lo, hi)
    mid = 0.5 * (t0[ids] + t1[ids])
    pivot = float(np.median(mid))
    lmask = t1[ids] < pivot
    rmask = t0[ids] > pivot
    node = _TreeNode(ids[~(lmask | rmask)], lo, hi)
    node.pivot = pivot
    node.left = _build(ids[lmask], lo, hi)
    node.right = _build(ids[rmask], lo, hi)
    return node


def _ragged(starts, stops):
    """Expand per-probe ranges ``[starts[k], stops[k])`` into flat index pairs."""
    lens = np.maximum(stops - starts, 0)
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    owner = np.repeat(np.arange(len(lens)), lens)
    first = np.cumsum(lens) - lens
    pos = np.arange(total) - np.repeat(first, lens) + np.repeat(starts, lens)
    return owner, pos


class _Query:
    def __init__(self, index, lo, hi, radius):
        self.index, self.lo, self.hi, self.r = index, lo, hi, radius
        self.qlo = lo[:, 2] - radius
        self.qhi = hi[:, 2] + radius
        self.out: list = []

    def bucket(self, node, probes):
        if probes.size == 0 or node.bucket.size == 0:
            return
        ix = self.index
        r = self.r
        a = np.searchsorted(node.bucket_x, self.lo[probes, 0] - r - node.width, side="left")
        b = np.searchsorted(node.bucket_x, self.hi[probes, 0] + r, side="right")
        k, pos = _ragged(a, b)
        if k.size == 0:
            return
        p, s = probes[k], node.bucket[pos]
        # cheap 1D rejections before the full box distance
        for axis in (2, 1):
            m = (ix.lo[s, axis] <= self.hi[p, axis] + r) & (ix.hi[s, axis] >= self.lo[p, axis] - r)
            p, s = p[m], s[m]
        gap = np.maximum(0.0, np.maximum(ix.lo[s] - self.hi[p], self.lo[p] - ix.hi[s]))
        d2 = np.einsum("ij,ij->i", gap, gap)
        keep = d2 < r * r if r > 0 else d2 <= 0
        self.out.append((p[keep], s[keep]))

    def run(self, node, probes):
        if probes.size == 0:
            return
        self.bucket(node, probes)
        if node.pivot is None:
            return
        lo, hi = self.qlo[probes], self.qhi[probes]
        self.run(node.left, probes[lo < node.pivot])
        self.run(node.right, probes[hi > node.pivot])

    def result(self):
        if not self.out:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        return np.concatenate([o[0] for o in self.out]), np.concatenate([o[1] for o in self.out])


class SegmentIndex:
    """Immutable index over segments given as endpoint arrays.

    ``p0``/``p1`` are ``(n, 3)`` arrays of ``(x, y, t)`` endpoints, ``owner``
    an integer code for the node of each segment.
    """

    def __init__(self, p0, p1, owner, records=None):
        self.p0 = np.ascontiguousarray(p0, dtype=float).reshape(-1, 3)
        self.p1 = np.ascontiguousarray(p1, dtype=float).reshape(-1, 3)
        self.owner = np.asarray(owner, dtype=np.int64).reshape(-1)
        self.lo = np.minimum(self.p0, self.p1)
        self.hi = np.maximum(self.p0, self.p1)
        self.records = records
        self._codes: dict = {}
        self._root = _build(np.arange(len(self.lo), dtype=np.int64), self.lo, self.hi)

    def __len__(self):
        return len(self.lo)

    @classmethod
    def from_records(cls, records) -> "SegmentIndex":
        records = list(records)
        codes: dict = {}
        owner = [codes.setdefault(r.node, len(codes)) for r in records]
        p0 = np.array([r.p0 for r in records], dtype=float).reshape(-1, 3)
        p1 = np.array([r.p1 for r in records], dtype=float).reshape(-1, 3)
        idx = cls(p0, p1, owner, records)
        idx._codes = codes
        return idx

    def _run(self, lo, hi, radius):
        q = _Query(self, lo, hi, radius)
        q.run(self._root, np.arange(len(lo), dtype=np.int64))
        return q.result()

    def stab_ids(self, t: float) -> np.ndarray:
        lo = np.array([[-np.inf, -np.inf, t]])
        hi = np.array([[np.inf, np.inf, t]])
        return np.sort(self._run(lo, hi, 0.0)[1])

    def box_candidates(self, lo, hi, owner, radius):
        """Pairs ``(probe, segment)`` with bounding boxes closer than ``radius``.

        Segments with the probe's owner are dropped. Results are sorted by
        probe then segment.
        """
        lo = np.asarray(lo, dtype=float).reshape(-1, 3)
        hi = np.asarray(hi, dtype=float).reshape(-1, 3)
        owner = np.asarray(owner, dtype=np.int64).reshape(-1)
        probe, seg = self._run(lo, hi, radius)
        keep = owner[probe] != self.owner[seg]
        probe, seg = probe[keep], seg[keep]
        order = np.lexsort((seg, probe))
        return probe[order], seg[order]

    def point_candidates(self, points, owner, radius):
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        return self.box_candidates(points, points, owner, radius)

    def _record(self, i):
        if self.records is None:
            raise ValueError("index built from arrays carries no records")
        return self.records[i]


def build(segments) -> SegmentIndex:
    return SegmentIndex.from_records(segments)


def nearby(index: SegmentIndex, probe: SegmentRecord, radius: float) -> list[SegmentRecord]:
    """Segments of other nodes that may lie within ``radius`` of ``probe``."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    if len(index) == 0:
        return []
    lo, hi = probe.bbox
    _, seg = index.box_candidates([lo], [hi], [index._codes.get(probe.node, -1)], radius)
    return [index._record(int(i)) for i in seg]


def stab(index: SegmentIndex, t: float) -> list[SegmentRecord]:
    """Segments whose time span contains ``t``."""
    if len(index) == 0:
        return []
    return [index._record(int(i)) for i in index.stab_ids(t)]


def segment_distance(p0, p1, q0, q1):
    """Minimum Euclidean distance between 3D segments, row-wise.

    Closest-point parametrisation with clamping; inputs broadcast to
    ``(k, 3)``.
    """
    p0, p1, q0, q1 = (np.atleast_2d(np.asarray(x, dtype=float)) for x in (p0, p1, q0, q1))
    d1, d2, r = p1 - p0, q1 - q0, p0 - q0
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = np.einsum("ij,ij->i", d1, r)
    b = np.einsum("ij,ij->i", d1, d2)
    eps = 1e-300
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = a * e - b * b
        s = np.where(denom > eps * np.maximum(a * e, 1.0), np.clip((b * f - c * e) / denom, 0, 1), 0.0)
        t = np.where(e > eps, (b * s + f) / e, 0.0)
        s_lo = np.where(a > eps, np.clip(-c / a, 0, 1), 0.0)
        s_hi = np.where(a > eps, np.clip((b - c) / a, 0, 1), 0.0)
        s = np.where(t < 0, s_lo, np.where(t > 1, s_hi, s))
        t = np.clip(t, 0, 1)
        s = np.where(e <= eps, s_lo, s)
        # degenerate first segment: project its point onto the second
        t = np.where(a <= eps, np.where(e > eps, np.clip(f / e, 0, 1), 0.0), t)
        s = np.where(a <= eps, 0.0, s)
    diff = (p0 + s[:, None] * d1) - (q0 + t[:, None] * d2)
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))
