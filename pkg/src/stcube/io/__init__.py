"""Dataset ingestion, drawing persistence and SVG export."""

from .drawing_json import SchemaError, load_drawing, load_timing, save_drawing, save_timing
from .svg import FRAME_PATTERN, Style, Viewport, frame_times, render_frame, render_frames
from .tabular import (
    DEFAULT_WINDOW,
    ParseError,
    discretize,
    from_slices,
    load_discrete,
    load_events,
    parse_time,
    slice_cells,
)

__all__ = [
    "DEFAULT_WINDOW",
    "FRAME_PATTERN",
    "ParseError",
    "SchemaError",
    "Style",
    "Viewport",
    "discretize",
    "frame_times",
    "from_slices",
    "load_discrete",
    "load_drawing",
    "load_events",
    "load_timing",
    "parse_time",
    "render_frame",
    "render_frames",
    "save_drawing",
    "save_timing",
    "slice_cells",
]
