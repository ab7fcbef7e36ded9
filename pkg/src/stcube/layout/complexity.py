"""Bend insertion and removal on trajectory polylines."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..model.cube import SpaceTimeDrawing
from .frame import Frame


def _adjust_points(frame: Frame, config, carry=None):
    """One removal pass then one insertion pass over the stacked points.

    Returns new points, their run ids and the carried per-point array.
    """
    pts = frame.pts
    removable = (frame.prev >= 0) & (frame.next >= 0)
    keep = kernels.simplify_mask(np.ascontiguousarray(pts), removable, config.bend_remove_threshold)
    pts = pts[keep]
    run_id = frame.run_id[keep]
    carry = None if carry is None else carry[keep]

    link = (run_id[1:] == run_id[:-1]) & (np.diff(pts[:, 2]) > 0)
    d = np.diff(pts, axis=0)
    long_ = link & (np.einsum("ij,ij->i", d, d) > config.bend_insert_threshold ** 2)
    i = np.flatnonzero(long_)
    if i.size:
        pts = np.insert(pts, i + 1, 0.5 * (pts[i] + pts[i + 1]), axis=0)
        run_id = np.insert(run_id, i + 1, run_id[i])
        if carry is not None:
            carry = np.insert(carry, i + 1, 0.5 * (carry[i] + carry[i + 1]), axis=0)
    return pts, run_id, carry


def adjust_complexity(drawing: SpaceTimeDrawing, config, carry=None, frame=None):
    """Remove bends whose neighbours are closer than the removal threshold,
    then split every segment longer than the insertion threshold at its
    midpoint. Run ends and jump points are never removed.

    With ``carry`` (a per-point array aligned with ``Frame(drawing)``) the
    array is returned alongside, following the same edits; inserted points
    receive the mean of their neighbours.
    """
    frame = frame or Frame(drawing)
    pts, run_id, carry_out = _adjust_points(frame, config, carry)
    out = drawing.copy()
    bounds = np.searchsorted(run_id, np.arange(len(frame.run_slices) + 1))
    for r, (node, ri, _, _) in enumerate(frame.run_slices):
        out.trajectories[node].runs[ri] = pts[bounds[r]:bounds[r + 1]].copy()
    if carry is None:
        return out
    return out, carry_out
