"""Continuous dynamic graph model and its space-time cube embedding."""

from .cube import (
    MonotonicityError,
    SpaceTimeDrawing,
    Trajectory,
    node_runs,
    stct,
    stct_inverse,
)
from .graph import (
    ContinuousDynamicGraph,
    ValidationError,
    Violation,
    appearance_from_intervals,
    appearance_intervals,
    canonical_edge,
    ensure_valid,
    validate,
)
from .intervals import (
    ConstantPiece,
    LinearPiece,
    OverlapError,
    PiecewiseAttribute,
    TimeInterval,
    attribute_value,
    merge_intervals,
)

__all__ = [
    "ConstantPiece",
    "ContinuousDynamicGraph",
    "LinearPiece",
    "MonotonicityError",
    "OverlapError",
    "PiecewiseAttribute",
    "SpaceTimeDrawing",
    "TimeInterval",
    "Trajectory",
    "ValidationError",
    "Violation",
    "appearance_from_intervals",
    "appearance_intervals",
    "attribute_value",
    "canonical_edge",
    "ensure_valid",
    "merge_intervals",
    "node_runs",
    "stct",
    "stct_inverse",
    "validate",
]
