import numpy as np
import pytest

from stcube.model import (
    ContinuousDynamicGraph,
    LinearPiece,
    PiecewiseAttribute,
    TimeInterval,
)
from stcube.model.intervals import ConstantPiece

TI = TimeInterval


def jane_graph():
    """Single node ``v`` with three position pieces, two labels and two
    appearance stretches."""
    pos = PiecewiseAttribute(
        [
            (TI.left_open(9, 12), LinearPiece((1, 0), (4, 0))),
            (TI.left_open(12, 15), LinearPiece((2, -2), (5, 1))),
            (TI.closed(17, 19), LinearPiece((5, 1), (4, 5))),
        ],
        default=(0.0, 0.0),
    )
    lab = PiecewiseAttribute(
        [(TI.left_open(10, 11), ConstantPiece("Jane Doe")), (TI.left_open(11, 16), ConstantPiece("Jane Smith"))],
        default="unknown",
    )
    return ContinuousDynamicGraph.from_intervals(
        {"v": [TI.half_open(2, 7), TI.left_open(9, 13)]}, positions={"v": pos}, labels={"v": lab}
    )


@pytest.fixture
def jane():
    return jane_graph()


def random_graph(rng, n_nodes, t_max=100.0, n_pieces=4):
    """Random valid graph with piecewise-linear positions, possible jumps
    and gaps in appearance, plus edges restricted to common presence."""
    nodes = list(range(n_nodes))
    apps, positions = {}, {}
    for v in nodes:
        cuts = np.sort(rng.uniform(0, t_max, size=2 * rng.integers(1, 3)))
        ivs = [TI.closed(a, b) for a, b in zip(cuts[::2], cuts[1::2]) if b > a]
        apps[v] = ivs or [TI.closed(0, t_max)]
        bps = np.sort(rng.uniform(0, t_max, size=n_pieces + 1))
        pieces = []
        for k, (a, b) in enumerate(zip(bps, bps[1:])):
            if b <= a:
                continue
            iv = TI.closed(a, b) if k == 0 else TI.left_open(a, b)
            pieces.append((iv, LinearPiece(rng.normal(size=2), rng.normal(size=2))))
        positions[v] = PiecewiseAttribute(pieces, default=tuple(rng.normal(size=2)))
    edges = {}
    for _ in range(n_nodes):
        u, v = rng.choice(n_nodes, size=2, replace=False) if n_nodes > 1 else (0, 0)
        if u == v:
            continue
        iu, iv = apps[u][0], apps[v][0]
        lo, hi = max(iu.start, iv.start), min(iu.end, iv.end)
        if hi > lo:
            edges[(int(u), int(v))] = [TI.closed(lo, hi)]
    return ContinuousDynamicGraph.from_intervals(apps, edges, positions=positions)
