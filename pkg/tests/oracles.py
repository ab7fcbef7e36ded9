"""Independent reference computations used by the tests."""

import numpy as np

from stcube.model import SpaceTimeDrawing, Trajectory


def sample_run(run, t):
    """Position on a run at times ``t``; after a jump the later point wins."""
    t = np.asarray(t, dtype=float)
    j = np.searchsorted(run[:, 2], t, side="right") - 1
    j = np.clip(j, 0, len(run) - 2)
    a, b = run[j], run[j + 1]
    span = b[:, 2] - a[:, 2]
    f = np.clip((t - a[:, 2]) / np.where(span > 0, span, 1.0), 0.0, 1.0)
    return a[:, :2] + f[:, None] * (b[:, :2] - a[:, :2])


def _pair_count(ru, rv, lo, hi, diameter, per_piece):
    # every piece between merged breakpoints gets the same number of samples,
    # so the step is never coarser than the shortest gap divided by per_piece
    T = np.unique(np.concatenate([ru[:, 2], rv[:, 2], [lo, hi]]))
    T = T[(T >= lo) & (T <= hi)]
    frac = np.arange(per_piece) / per_piece
    t = (T[:-1, None] + frac[None, :] * np.diff(T)[:, None]).ravel()
    d = np.linalg.norm(sample_run(ru, t) - sample_run(rv, t), axis=1)
    inside = d < diameter
    return int(inside[0]) + int(np.sum(~inside[:-1] & inside[1:])), np.min(np.abs(d - diameter))


def dense_crowding(drawing, diameter, per_piece=200, band=2e-3, refine=20):
    """Count outside-to-inside transitions of every co-present pair on a
    dense time grid, plus one for pairs overlapping when co-presence starts.

    Pairs that come within ``band`` of the threshold, where a short graze
    could fall between samples, are resampled ``refine`` times finer.
    """
    runs = [(k, r) for k, tr in enumerate(drawing.trajectories.values()) for r in tr.runs]
    total = 0
    for i in range(len(runs)):
        for j in range(i + 1, len(runs)):
            (ki, ru), (kj, rv) = runs[i], runs[j]
            if ki == kj:
                continue
            lo, hi = max(ru[0, 2], rv[0, 2]), min(ru[-1, 2], rv[-1, 2])
            if not hi > lo:
                continue
            count, near = _pair_count(ru, rv, lo, hi, diameter, per_piece)
            if near < band:
                count, _ = _pair_count(ru, rv, lo, hi, diameter, per_piece * refine)
            total += count
    return total


def random_crowding_drawing(rng, n_nodes, t_max=10.0, extent=1.0, max_bends=5, jumps=False):
    """Random drawing with one run per node over a random sub-span."""
    traj = {}
    for v in range(n_nodes):
        a, b = np.sort(rng.uniform(0, t_max, 2))
        if b - a < 1.0:
            a, b = 0.0, t_max
        k = int(rng.integers(2, max_bends + 2))
        t = np.concatenate([[a], np.sort(rng.uniform(a, b, k - 2)), [b]])
        pts = np.column_stack([rng.uniform(0, extent, (k, 2)), t])
        if jumps and k > 2 and rng.random() < 0.5:
            j = int(rng.integers(1, k - 1))
            pts = np.insert(pts, j + 1, [*rng.uniform(0, extent, 2), pts[j, 2]], axis=0)
        traj[v] = Trajectory(v, [pts])
    return SpaceTimeDrawing(traj)
