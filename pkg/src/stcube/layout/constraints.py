"""Movement constraints: acceleration, max-movement and time correctness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frame import Frame

# smallest time gap (cube units) two approaching neighbours can leave; a
# relative margin alone lets the gap shrink geometrically to an exact tie
MIN_TIME_GAP = 1e-6


@dataclass
class MovementField:
    """Per control point summed force and the previous iteration's movement."""

    force: np.ndarray
    previous: np.ndarray

    def __post_init__(self):
        if self.force.shape != self.previous.shape:
            raise ValueError("force and previous movement must align")

    @classmethod
    def zeros(cls, n: int) -> "MovementField":
        return cls(np.zeros((n, 3)), np.zeros((n, 3)))


def acceleration(move: np.ndarray, previous: np.ndarray) -> np.ndarray:
    """Scale by ``1 + 0.5 cos(theta)`` clipped to [0.3, 1.5], theta the
    angle to the previous movement. Points without history are unchanged."""
    a = np.linalg.norm(move, axis=1)
    b = np.linalg.norm(previous, axis=1)
    ok = (a > 0) & (b > 0)
    cos = np.zeros(len(move))
    cos[ok] = np.einsum("ij,ij->i", move[ok], previous[ok]) / (a[ok] * b[ok])
    k = np.where(ok, np.clip(1.0 + 0.5 * cos, 0.3, 1.5), 1.0)
    return move * k[:, None]


def clamp(move: np.ndarray, limit: float) -> np.ndarray:
    norm = np.linalg.norm(move, axis=1)
    k = np.where(norm > limit, limit / np.where(norm > 0, norm, 1.0), 1.0)
    return move * k[:, None]


def time_correct(move: np.ndarray, frame: Frame) -> np.ndarray:
    """Zero time movement on pinned points and keep bends strictly before
    the midpoint to their neighbours, less half of ``MIN_TIME_GAP``."""
    move = move.copy()
    move[frame.pinned, 2] = 0.0
    b = np.flatnonzero(~frame.pinned)
    if b.size:
        t = frame.pts[:, 2]
        mt = move[b, 2]
        gap = np.where(mt > 0, t[frame.next[b]] - t[b], t[b] - t[frame.prev[b]])
        room = np.maximum(0.5 * (gap - MIN_TIME_GAP), 0.0)
        move[b, 2] = np.sign(mt) * np.minimum(np.abs(mt), room)
    return move


def apply_constraints(field: MovementField, frame: Frame, config, iteration: int) -> np.ndarray:
    """Turn summed forces into the movement actually applied this round."""
    move = acceleration(field.force, field.previous)
    move = clamp(move, config.max_move(iteration))
    return time_correct(move, frame)
