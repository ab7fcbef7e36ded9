"""SVG snapshots of a drawing sliced at a point in time."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from ..metrics import DEFAULT_DIAMETER, node_positions, present_at

FRAME_PATTERN = "frame_%06d.svg"


@dataclass(frozen=True)
class Style:
    width: int = 800
    height: int = 800
    margin: float = 40.0
    diameter: float = DEFAULT_DIAMETER
    labels: bool = True
    node_fill: str = "#4a78b5"
    edge_stroke: str = "#999999"
    font_size: float = 11.0


class Viewport:
    """Maps drawing coordinates to pixels, preserving aspect ratio."""

    def __init__(self, drawing, style: Style = Style()):
        pts = [r[:, :2] for t in drawing.trajectories.values() for r in t.runs]
        if pts:
            allp = np.vstack(pts)
            self.lo, self.hi = allp.min(axis=0), allp.max(axis=0)
        else:
            self.lo, self.hi = np.zeros(2), np.ones(2)
        span = float(max(self.hi[0] - self.lo[0], self.hi[1] - self.lo[1], 1e-12))
        avail = min(style.width, style.height) - 2 * style.margin
        self.k = max(avail, 1.0) / span
        self.style = style

    def to_px(self, p) -> tuple:
        x = self.style.margin + (p[0] - self.lo[0]) * self.k
        # y grows upward in the drawing
        y = self.style.height - self.style.margin - (p[1] - self.lo[1]) * self.k
        return float(x), float(y)


def _num(x: float) -> str:
    return f"{x:.3f}"


def render_frame(drawing, graph, t: float, style: Style = Style(), viewport: Viewport | None = None) -> str:
    """SVG 1.1 document with the nodes and edges present at data time ``t``."""
    dom = graph.time_domain
    if dom is None or not dom.start <= t <= dom.end:
        raise ValueError(f"time {t} outside the time domain")
    vp = viewport or Viewport(drawing, style)
    z = np.array([t * drawing.tau])
    pos = {}
    for v in graph.nodes:
        if v in drawing.trajectories and present_at(graph, v, t):
            p = node_positions(drawing.trajectories[v], z)[0]
            if np.all(np.isfinite(p)):
                pos[v] = p
    r = 0.5 * style.diameter * vp.k
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{style.width}" '
        f'height="{style.height}" viewBox="0 0 {style.width} {style.height}">',
        f"<title>t = {escape(repr(float(t)))}</title>",
        f'<g id="edges" stroke="{style.edge_stroke}" stroke-width="1">',
    ]
    for u, v in graph.edges:
        if u in pos and v in pos and present_at(graph, (u, v), t):
            (x1, y1), (x2, y2) = vp.to_px(pos[u]), vp.to_px(pos[v])
            out.append(f'<line x1="{_num(x1)}" y1="{_num(y1)}" x2="{_num(x2)}" y2="{_num(y2)}"/>')
    out.append("</g>")
    out.append(f'<g id="nodes" fill="{style.node_fill}">')
    labels = []
    for v, p in pos.items():
        x, y = vp.to_px(p)
        out.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{_num(r)}"><title>{escape(str(v))}</title></circle>')
        if style.labels:
            text = graph.label_at(v, t)
            if text:
                labels.append(f'<text x="{_num(x + r + 2)}" y="{_num(y)}">{escape(str(text))}</text>')
    out.append("</g>")
    out.append(f'<g id="labels" font-family="sans-serif" font-size="{style.font_size}">')
    out.extend(labels)
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def frame_times(graph, step: float, start=None, end=None) -> np.ndarray:
    """``ceil(length / step)`` evenly stepped times from the domain start."""
    if not step > 0:
        raise ValueError("step must be positive")
    dom = graph.time_domain
    if dom is None:
        return np.zeros(0)
    lo = dom.start if start is None else max(start, dom.start)
    hi = dom.end if end is None else min(end, dom.end)
    if hi < lo:
        return np.zeros(0)
    n = max(int(math.ceil((hi - lo) / step - 1e-9)), 1)
    return lo + step * np.arange(n)


def render_frames(drawing, graph, outdir, step: float, style: Style = Style(), start=None, end=None) -> list:
    """Write one SVG per time step as ``frame_%06d.svg``; returns the paths."""
    times = frame_times(graph, step, start, end)
    os.makedirs(outdir, exist_ok=True)
    vp = Viewport(drawing, style)
    paths = []
    for k, t in enumerate(times):
        p = os.path.join(outdir, FRAME_PATTERN % k)
        with open(p, "w") as fh:
            fh.write(render_frame(drawing, graph, float(t), style, vp))
        paths.append(p)
    return paths
