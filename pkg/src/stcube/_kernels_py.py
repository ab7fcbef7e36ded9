"""Pure numpy implementation of the force kernels.

Same signatures and semantics as the compiled ``_kernels`` extension; used
when the extension is not built or ``STCUBE_PURE_PYTHON`` is set.
"""

import numpy as np

COLLINEAR_EPS = 1e-9


def _scatter(out, idx, vec):
    n = out.shape[0]
    for k in range(3):
        out[:, k] += np.bincount(idx, weights=vec[:, k], minlength=n)


def _repel_magnitude(dist, delta, cutoff, weight):
    d = np.maximum(dist, 0.1 * delta)
    return np.where(dist < cutoff, weight * delta * (delta / d) ** 2, 0.0)


def _point_point(pts, ia, iq, wa, wq, delta, cutoff, weight, out):
    r = pts[ia] - pts[iq]
    dist = np.sqrt(np.einsum("ij,ij->i", r, r))
    ok = (dist > 0) & (dist < cutoff)
    ia, iq, r, dist, wa, wq = ia[ok], iq[ok], r[ok], dist[ok], wa[ok], wq[ok]
    f = (_repel_magnitude(dist, delta, cutoff, weight) / dist)[:, None] * r
    _scatter(out, ia, wa[:, None] * f)
    _scatter(out, iq, -wq[:, None] * f)


def repulsion(pts, seg_a, seg_b, seg_w, pt_w, end_share, pi, sj, delta, cutoff, weight, out):
    """Accumulate node repulsion for (point, segment) pairs into ``out``.

    Point ``pts[pi[k]]`` is repelled from segment ``seg_a[sj[k]] -> seg_b[sj[k]]``.
    When the point projects strictly onto the segment and is not collinear
    with it, a point-to-segment force acts, with its reaction split between
    the segment ends by the projection parameter. Otherwise the point is
    repelled from both segment ends separately.

    The force on the point is multiplied by ``seg_w`` of the segment and the
    reaction by ``pt_w`` of the point; in the point-to-point case both are
    further multiplied by ``end_share``.
    """
    pi = np.asarray(pi, dtype=np.int64)
    sj = np.asarray(sj, dtype=np.int64)
    ic = np.asarray(seg_a, dtype=np.int64)[sj]
    id_ = np.asarray(seg_b, dtype=np.int64)[sj]
    ws = np.asarray(seg_w, dtype=float)[sj]
    wp = np.asarray(pt_w, dtype=float)[pi]
    a, c, d = pts[pi], pts[ic], pts[id_]
    v = d - c
    l2 = np.einsum("ij,ij->i", v, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(l2 > 0, np.einsum("ij,ij->i", a - c, v) / l2, -1.0)
    r = a - (c + s[:, None] * v)
    dist = np.sqrt(np.einsum("ij,ij->i", r, r))
    inside = (l2 > 0) & (s >= 0) & (s <= 1) & (dist > COLLINEAR_EPS * delta)

    k = inside & (dist < cutoff)
    f = (_repel_magnitude(dist[k], delta, cutoff, weight) / dist[k])[:, None] * r[k]
    _scatter(out, pi[k], ws[k][:, None] * f)
    rf = wp[k][:, None] * f
    _scatter(out, ic[k], -(1.0 - s[k])[:, None] * rf)
    _scatter(out, id_[k], -s[k][:, None] * rf)

    o = ~inside
    wa, wq = end_share * ws[o], end_share * wp[o]
    _point_point(pts, pi[o], ic[o], wa, wq, delta, cutoff, weight, out)
    _point_point(pts, pi[o], id_[o], wa, wq, delta, cutoff, weight, out)


def attraction(pts, ia, ib, ic, id_, f, g, delta, weight, lever, out):
    """Accumulate edge attraction for pairs of time-overlapping segments.

    Segment ``a -> b`` of one endpoint and ``c -> d`` of the other are both
    cut at the common times ``f`` (earliest) and ``g`` (latest). Contraction
    forces between the cut points are handed to the segment ends, scaled by
    the coverage ``(g - f) / length``. With ``lever`` false a force at time
    ``x`` goes to end ``a`` in proportion to ``(x - a_t) / length``; with
    ``lever`` true in proportion to ``(b_t - x) / length``.
    """
    ia, ib, ic, id_ = (np.asarray(x, dtype=np.int64) for x in (ia, ib, ic, id_))
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    a, b, c, d = pts[ia], pts[ib], pts[ic], pts[id_]

    def cut(p0, p1, t):
        u = (t - p0[:, 2]) / (p1[:, 2] - p0[:, 2])
        return p0 + u[:, None] * (p1 - p0)

    m, n = cut(a, b, f), cut(a, b, g)
    p, q = cut(c, d, f), cut(c, d, g)

    def contract(x, y):
        diff = y - x
        diff[:, 2] = 0.0
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        with np.errstate(divide="ignore", invalid="ignore"):
            mag = np.where(dist > delta, weight * (dist - delta) / dist, 0.0)
        return mag[:, None] * diff

    fm, fn = contract(m, p), contract(n, q)

    def share(e0, e1, t_first, t_last, f_first, f_last, sign):
        length = e1[:, 2] - e0[:, 2]
        cov = (t_last - t_first) / length
        w_first = (t_first - e0[:, 2]) / length
        w_last = (t_last - e0[:, 2]) / length
        if lever:
            w_first, w_last = 1.0 - w_first, 1.0 - w_last
        to0 = cov[:, None] * (w_first[:, None] * f_first + w_last[:, None] * f_last)
        to1 = cov[:, None] * ((1 - w_first)[:, None] * f_first + (1 - w_last)[:, None] * f_last)
        return sign * to0, sign * to1

    fa, fb = share(a, b, f, g, fm, fn, 1.0)
    fc, fd = share(c, d, f, g, fm, fn, -1.0)
    _scatter(out, ia, fa)
    _scatter(out, ib, fb)
    _scatter(out, ic, fc)
    _scatter(out, id_, fd)


def simplify_mask(pts, removable, threshold):
    """Greedy bend removal along the stacked points.

    Point ``i`` marked ``removable`` is dropped when the last kept point and
    ``pts[i + 1]`` are closer than ``threshold``. Returns the keep mask.
    """
    n = len(pts)
    keep = np.ones(n, dtype=bool)
    cand = np.flatnonzero(removable)
    if cand.size == 0:
        return keep
    p = np.asarray(pts, dtype=float)
    t2 = threshold * threshold
    last = -1
    for i in cand.tolist():
        # the last kept point before i is i - 1 unless i - 1 was dropped
        j = i - 1 if keep[i - 1] else last
        d = p[i + 1] - p[j]
        if d[0] * d[0] + d[1] * d[1] + d[2] * d[2] < t2:
            keep[i] = False
            last = j
    return keep
