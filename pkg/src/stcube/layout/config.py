from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace

DEFAULT_WEIGHTS = {
    "repulsion": 0.7,
    "attraction": 1.0,
    "gravity": 0.06,
    "straightening": 0.5,
    "mental_map": 1.0,
}

CONFIG_ENV = "STCUBE_CONFIG"


@dataclass(frozen=True)
class LayoutConfig:
    """Parameters of the force-directed optimiser.

    Thresholds left as ``None`` are derived from ``delta``: maximum
    movement decays linearly from ``2 delta`` to ``0.1 delta``, bends are
    inserted in segments longer than ``2 delta`` and removed when their
    neighbours are closer than ``1.5 delta``, and repulsion ignores pairs
    farther than ``5 delta``.
    """

    delta: float = 1.0
    tau: float = 1.0
    iterations: int = 100
    force_weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    max_move_start: float | None = None
    max_move_end: float | None = None
    bend_insert_threshold: float | None = None
    bend_remove_threshold: float | None = None
    repulsion_cutoff: float | None = None
    rng_seed: int = 0
    mode: str = "continuous"
    slice_times: tuple | None = None
    # "far_end": a force at time x reaches end a with weight (x - a_t) / length;
    # "lever": with weight (b_t - x) / length
    attraction_share: str = "far_end"
    # "length": repulsion scaled by the trajectory length each side stands for;
    # "count": every (point, segment) pair counts once
    repulsion_weighting: str = "length"
    init_extent: float | None = None

    def __post_init__(self):
        weights = dict(DEFAULT_WEIGHTS)
        unknown = set(self.force_weights) - set(weights)
        if unknown:
            raise ValueError(f"unknown force weight(s): {sorted(unknown)}")
        weights.update(self.force_weights)
        object.__setattr__(self, "force_weights", weights)
        d = self.delta
        if not d > 0:
            raise ValueError("delta must be positive")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        for name, default in (
            ("max_move_start", 2.0 * d),
            ("max_move_end", 0.1 * d),
            ("bend_insert_threshold", 2.0 * d),
            ("bend_remove_threshold", 1.5 * d),
            ("repulsion_cutoff", 5.0 * d),
        ):
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.max_move_end <= self.max_move_start:
            raise ValueError("max_move_end must not exceed max_move_start")
        if self.mode not in ("continuous", "discrete"):
            raise ValueError(f"mode must be 'continuous' or 'discrete', got {self.mode!r}")
        if self.attraction_share not in ("far_end", "lever"):
            raise ValueError("attraction_share must be 'far_end' or 'lever'")
        if self.repulsion_weighting not in ("length", "count"):
            raise ValueError("repulsion_weighting must be 'length' or 'count'")
        if self.slice_times is not None:
            st = tuple(float(t) for t in self.slice_times)
            if any(b <= a for a, b in zip(st, st[1:])):
                raise ValueError("slice_times must be strictly increasing")
            object.__setattr__(self, "slice_times", st)
        if self.mode == "discrete" and not self.slice_times:
            raise ValueError("discrete mode needs slice_times")

    def weight(self, name: str) -> float:
        return self.force_weights[name]

    def max_move(self, iteration: int) -> float:
        if self.iterations <= 1:
            return self.max_move_start
        frac = min(max(iteration / (self.iterations - 1), 0.0), 1.0)
        return self.max_move_start + frac * (self.max_move_end - self.max_move_start)

    def replace(self, **changes) -> "LayoutConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["slice_times"] is not None:
            d["slice_times"] = list(d["slice_times"])
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "LayoutConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config key(s): {sorted(unknown)}")
        return cls(**data)


def load_config_file(path=None) -> dict:
    """Config overrides from a JSON file, by default the one named in
    ``$STCUBE_CONFIG``. Missing variable means no overrides."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return data
