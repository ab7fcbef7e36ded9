"""Force-directed layout of dynamic graphs in continuous time.

Node trajectories live in a space-time cube as adaptive polylines and are
optimised directly, without sampling the graph on timeslices.
"""

from .model import (
    ContinuousDynamicGraph,
    PiecewiseAttribute,
    SpaceTimeDrawing,
    TimeInterval,
    Trajectory,
    stct,
    stct_inverse,
    validate,
)

__version__ = "0.1.0"
