"""Synthetic datasets shipped with the package.

``vandebunt_like`` and ``newcomb_like`` are timesliced; ``rugby_like`` is an
event log with second-resolution timestamps, drawn in days.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")
DAY = 86400.0


@dataclass(frozen=True)
class Dataset:
    name: str
    filename: str
    kind: str  # "discrete" or "events"
    tau: float = 1.0
    window: float | None = None
    slice_step: float | None = None

    @property
    def path(self) -> str:
        return os.path.join(DATA_DIR, self.filename)

    @property
    def continuous(self) -> bool:
        return self.kind == "events"


DATASETS = {
    d.name: d
    for d in (
        Dataset("vandebunt_like", "vandebunt_like.csv", "discrete"),
        Dataset("newcomb_like", "newcomb_like.csv", "discrete"),
        Dataset("rugby_like", "rugby_like.csv", "events", tau=1.0 / DAY, window=DAY, slice_step=DAY),
    )
}


def daily_slices(graph, step: float = DAY) -> list:
    """Multiples of ``step`` inside the graph's time domain."""
    dom = graph.time_domain
    k0, k1 = math.ceil(dom.start / step), math.floor(dom.end / step)
    return [k * step for k in range(k0, k1 + 1)]


def load(name: str):
    """``(graph, slice_times, dataset)`` for a bundled dataset."""
    from .io import load_discrete, load_events

    try:
        ds = DATASETS[name]
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; choose from {sorted(DATASETS)}") from None
    if ds.kind == "discrete":
        graph, st = load_discrete(ds.path)
    else:
        graph = load_events(ds.path, window=ds.window)
        st = daily_slices(graph, ds.slice_step)
    return graph, st, ds
