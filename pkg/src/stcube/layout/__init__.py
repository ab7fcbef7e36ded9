"""Force-directed layout of space-time drawings."""

from .complexity import adjust_complexity
from .config import CONFIG_ENV, DEFAULT_WEIGHTS, LayoutConfig, load_config_file
from .constraints import MovementField, apply_constraints
from .engine import Layout, initialize, iterate, layout
from .forces import (
    endpoint_share,
    force_edge_attraction,
    force_gravity,
    force_mental_map,
    force_node_repulsion,
    force_straightening,
    mental_map_factor,
)
from .frame import Frame

__all__ = [
    "CONFIG_ENV",
    "DEFAULT_WEIGHTS",
    "Frame",
    "Layout",
    "LayoutConfig",
    "MovementField",
    "adjust_complexity",
    "apply_constraints",
    "endpoint_share",
    "force_edge_attraction",
    "force_gravity",
    "force_mental_map",
    "force_node_repulsion",
    "force_straightening",
    "initialize",
    "iterate",
    "layout",
    "load_config_file",
    "mental_map_factor",
]
