"""The five forces acting on trajectory control points.

Each function returns an ``(n, 3)`` array of movement contributions aligned
with ``frame.pts``, already multiplied by the force's weight.
"""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..index import SegmentIndex, _ragged
from .frame import Frame


def build_index(frame: Frame) -> SegmentIndex:
    return SegmentIndex(frame.pts[frame.seg[:, 0]], frame.pts[frame.seg[:, 1]], frame.seg_owner)


def repulsion_weights(frame: Frame, config):
    """Per-segment and per-point multipliers of the repulsion force.

    With length weighting a segment acts in proportion to its 3D length
    and a point reacts in proportion to half the length of its adjacent
    segments, both in units of delta, so the force between two trajectories
    does not depend on how many bends they have.
    """
    n_seg = len(frame.seg)
    if config.repulsion_weighting == "count":
        return np.ones(n_seg), np.ones(len(frame)), 1.0
    d = frame.pts[frame.seg[:, 1]] - frame.pts[frame.seg[:, 0]]
    seg_len = np.sqrt(np.einsum("ij,ij->i", d, d)) / config.delta
    pt = np.zeros(len(frame))
    np.add.at(pt, frame.seg[:, 0], 0.5 * seg_len)
    np.add.at(pt, frame.seg[:, 1], 0.5 * seg_len)
    return seg_len, pt, 0.5


def force_node_repulsion(frame: Frame, index: SegmentIndex, config) -> np.ndarray:
    out = frame.zeros()
    w = config.weight("repulsion")
    if w == 0 or len(index) == 0:
        return out
    probes = np.flatnonzero(frame.active)
    k, sj = index.point_candidates(frame.pts[probes], frame.owner[probes], config.repulsion_cutoff)
    pi = np.ascontiguousarray(probes[k], dtype=np.int64)
    sj = np.ascontiguousarray(sj, dtype=np.int64)
    seg_w, pt_w, end_share = repulsion_weights(frame, config)
    kernels.repulsion(
        frame.pts, np.ascontiguousarray(frame.seg[:, 0]), np.ascontiguousarray(frame.seg[:, 1]),
        seg_w, pt_w, end_share, pi, sj, config.delta, config.repulsion_cutoff, w, out,
    )
    return out


def edge_intervals(graph, tau: float) -> list:
    """``(u, v, [(lo, hi), ...])`` per edge with cube-time presence intervals."""
    out = []
    for e in graph.edges:
        ivs = [(iv.start * tau, iv.end * tau) for iv in graph.appearance_intervals(e) if iv.end > iv.start]
        if ivs:
            out.append((e[0], e[1], np.array(ivs, dtype=float)))
    return out


def attraction_jobs(frame: Frame, intervals) -> tuple:
    """Segment pairs of linked nodes that overlap each other and the edge.

    Returns point indices ``(a, b, c, d)`` of the two segments and the
    common time window ``(f, g)`` with ``g > f``.
    """
    t0 = frame.pts[frame.seg[:, 0], 2]
    t1 = frame.pts[frame.seg[:, 1], 2]
    parts = []
    for u, v, ivs in intervals:
        cu, cv = frame.code.get(u), frame.code.get(v)
        if cu is None or cv is None:
            continue
        (us, ue), (vs, ve) = frame.node_seg[cu], frame.node_seg[cv]
        if ue == us or ve == vs:
            continue
        lo, hi = ivs[:, 0], ivs[:, 1]
        ua = us + np.searchsorted(t1[us:ue], lo, side="right")
        ub = us + np.searchsorted(t0[us:ue], hi, side="left")
        k, su = _ragged(ua, ub)
        if k.size == 0:
            continue
        # for each (interval, u-segment) the overlapping v-segments
        va = vs + np.searchsorted(t1[vs:ve], np.maximum(lo[k], t0[su]), side="right")
        vb = vs + np.searchsorted(t0[vs:ve], np.minimum(hi[k], t1[su]), side="left")
        kk, sv = _ragged(va, vb)
        if kk.size == 0:
            continue
        k, su = k[kk], su[kk]
        f = np.maximum.reduce([t0[su], t0[sv], lo[k]])
        g = np.minimum.reduce([t1[su], t1[sv], hi[k]])
        ok = g > f
        parts.append((su[ok], sv[ok], f[ok], g[ok]))
    if not parts:
        e = np.empty(0, dtype=np.int64)
        return e, e, e, e, np.empty(0), np.empty(0)
    su = np.concatenate([p[0] for p in parts])
    sv = np.concatenate([p[1] for p in parts])
    f = np.concatenate([p[2] for p in parts])
    g = np.concatenate([p[3] for p in parts])
    seg = frame.seg
    return (seg[su, 0].copy(), seg[su, 1].copy(), seg[sv, 0].copy(), seg[sv, 1].copy(), f, g)


def force_edge_attraction(frame: Frame, intervals, config) -> np.ndarray:
    out = frame.zeros()
    w = config.weight("attraction")
    if w == 0:
        return out
    ia, ib, ic, id_, f, g = attraction_jobs(frame, intervals)
    if ia.size:
        kernels.attraction(
            frame.pts, ia, ib, ic, id_, np.ascontiguousarray(f), np.ascontiguousarray(g),
            config.delta, w, config.attraction_share == "lever", out,
        )
    return out


def endpoint_share(a_t: float, b_t: float, m_t: float, n_t: float) -> float:
    """Fraction of the contraction force at ``m`` handed to endpoint ``a``
    of segment ``a -> b`` when the edge covers ``[m_t, n_t]`` of it."""
    return (a_t - m_t) / (a_t - b_t) * ((n_t - m_t) / (a_t - b_t))


def force_gravity(frame: Frame, config, center) -> np.ndarray:
    out = frame.zeros()
    w = config.weight("gravity")
    a = frame.active
    out[a, :2] = w * (np.asarray(center, dtype=float)[None, :] - frame.pts[a, :2])
    return out


def force_straightening(frame: Frame, config) -> np.ndarray:
    """Bends move toward the centroid of themselves and their neighbours;
    piece ends move in the plane toward the midpoint with their neighbour."""
    out = frame.zeros()
    w = config.weight("straightening")
    pts, prv, nxt = frame.pts, frame.prev, frame.next
    bend = (prv >= 0) & (nxt >= 0)
    b = np.flatnonzero(bend)
    out[b] = w * ((pts[prv[b]] + pts[b] + pts[nxt[b]]) / 3.0 - pts[b])
    for idx, nb in ((np.flatnonzero((prv < 0) & (nxt >= 0)), nxt), (np.flatnonzero((nxt < 0) & (prv >= 0)), prv)):
        other = nb[idx]
        out[idx, :2] = w * (0.5 * (pts[idx, :2] + pts[other, :2]) - pts[idx, :2])
    return out


# keeps the force finite for segments squeezed to near-zero duration
MENTAL_MAP_CAP = 1e9


def mental_map_factor(planar: np.ndarray, dt: np.ndarray) -> np.ndarray:
    """``alpha / (90deg - alpha)`` for a segment with planar length ``planar``
    spanning ``dt`` along the time axis."""
    # complement taken directly so nearly flat segments do not round to 90deg
    rest = np.arctan2(dt, planar)
    if np.any(rest <= 0):
        raise AssertionError("segment perpendicular to the time axis")
    return np.minimum(np.arctan2(planar, dt) / rest, MENTAL_MAP_CAP)


def force_mental_map(frame: Frame, config) -> np.ndarray:
    out = frame.zeros()
    w = config.weight("mental_map")
    if w == 0 or len(frame.seg) == 0:
        return out
    ia, ib = frame.seg[:, 0], frame.seg[:, 1]
    d = frame.pts[ib, :2] - frame.pts[ia, :2]
    dt = frame.pts[ib, 2] - frame.pts[ia, 2]
    k = w * mental_map_factor(np.hypot(d[:, 0], d[:, 1]), dt)
    f = k[:, None] * d
    for c in range(2):
        out[:, c] += np.bincount(ia, weights=f[:, c], minlength=len(out))
        out[:, c] -= np.bincount(ib, weights=f[:, c], minlength=len(out))
    return out
