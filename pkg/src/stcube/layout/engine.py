"""Force-directed optimisation loop over a space-time drawing."""

from __future__ import annotations

import time

import numpy as np

from ..model.cube import SpaceTimeDrawing, stct
from ..model.graph import ContinuousDynamicGraph
from .complexity import adjust_complexity
from .config import LayoutConfig
from .constraints import MovementField, apply_constraints
from .forces import (
    build_index,
    edge_intervals,
    force_edge_attraction,
    force_gravity,
    force_mental_map,
    force_node_repulsion,
    force_straightening,
)
from .frame import Frame


def _with_slice_points(run: np.ndarray, cuts: np.ndarray) -> np.ndarray:
    t0, t1 = run[0, 2], run[-1, 2]
    inner = cuts[(cuts > t0) & (cuts < t1)]
    if inner.size == 0:
        return run
    extra = np.column_stack([np.full(inner.size, run[0, 0]), np.full(inner.size, run[0, 1]), inner])
    out = np.vstack([run, extra])
    # stable sort keeps the order of equal-time jump pairs
    return out[np.argsort(out[:, 2], kind="stable")]


def initialize(graph: ContinuousDynamicGraph, config: LayoutConfig) -> SpaceTimeDrawing:
    """Random planar position per node, extruded along the time axis.

    In discrete mode each run also gets a control point at every slice time
    it spans.
    """
    drawing = stct(graph, tau=config.tau, delta=config.delta)
    rng = np.random.default_rng(config.rng_seed)
    n = len(drawing.trajectories)
    extent = config.init_extent or 2.0 * config.delta * np.sqrt(max(n, 1))
    xy = rng.uniform(0.0, extent, size=(n, 2))
    cuts = None
    if config.mode == "discrete":
        cuts = np.asarray(config.slice_times, dtype=float) * config.tau
    for k, traj in enumerate(drawing.trajectories.values()):
        runs = []
        for run in traj.runs:
            run = run.copy()
            run[:, :2] = xy[k]
            if cuts is not None:
                run = _with_slice_points(run, cuts)
            runs.append(run)
        traj.runs = runs
    drawing.meta = {"seed": config.rng_seed, "config": config.to_dict()}
    return drawing


def initial_center(drawing: SpaceTimeDrawing) -> np.ndarray:
    """2D centroid of the nodes' initial positions."""
    firsts = [t.runs[0][0, :2] for t in drawing.trajectories.values() if t.runs]
    if not firsts:
        return np.zeros(2)
    return np.mean(firsts, axis=0)


class Layout:
    """Stateful optimiser. ``step`` performs one round, ``run`` all of them."""

    def __init__(self, graph, config: LayoutConfig | None = None, drawing=None, center=None):
        self.graph = graph
        self.config = config or LayoutConfig()
        self.drawing = drawing if drawing is not None else initialize(graph, self.config)
        self.center = np.asarray(center, dtype=float) if center is not None else initial_center(self.drawing)
        self.intervals = edge_intervals(graph, self.config.tau)
        self.previous = None
        self.iteration = 0
        self.runtime = 0.0

    @property
    def discrete(self) -> bool:
        return self.config.mode == "discrete"

    def frame(self) -> Frame:
        return Frame(self.drawing, pin_all_times=self.discrete)

    def forces(self, frame: Frame) -> dict:
        cfg = self.config
        return {
            "repulsion": force_node_repulsion(frame, build_index(frame), cfg),
            "attraction": force_edge_attraction(frame, self.intervals, cfg),
            "gravity": force_gravity(frame, cfg, self.center),
            "straightening": force_straightening(frame, cfg),
            "mental_map": force_mental_map(frame, cfg),
        }

    def step(self) -> SpaceTimeDrawing:
        cfg = self.config
        frame = self.frame()
        total = sum(self.forces(frame).values())
        prev = self.previous if self.previous is not None and len(self.previous) == len(frame) else frame.zeros()
        move = apply_constraints(MovementField(total, prev), frame, cfg, self.iteration)
        drawing = self.drawing.copy()
        frame.drawing = drawing
        frame.write_back(frame.pts + move)
        if not self.discrete:
            drawing, move = adjust_complexity(drawing, cfg, carry=move)
        self.drawing = drawing
        self.previous = move
        self.iteration += 1
        return drawing

    def run(self, iterations: int | None = None, callback=None) -> SpaceTimeDrawing:
        n = self.config.iterations if iterations is None else iterations
        t0 = time.perf_counter()
        for _ in range(n):
            self.step()
            if callback is not None:
                callback(self)
        self.runtime += time.perf_counter() - t0
        return self.drawing


def iterate(drawing, graph, config: LayoutConfig, iteration: int, center=None, previous=None) -> SpaceTimeDrawing:
    """One round on ``drawing``. Without ``center`` gravity pulls toward the
    drawing's current node centroid."""
    lay = Layout(graph, config, drawing=drawing, center=center)
    lay.iteration = iteration
    lay.previous = previous
    return lay.step()


def layout(graph, config: LayoutConfig | None = None, callback=None) -> SpaceTimeDrawing:
    return Layout(graph, config).run(callback=callback)
