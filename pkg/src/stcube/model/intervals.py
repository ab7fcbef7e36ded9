"""Time intervals and piecewise attributes.

A piecewise attribute maps time to a value through a set of disjoint
intervals, each carrying a piece function, with a default value for any
time outside every interval.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Any, Generic, Iterable, Sequence, TypeVar

import numpy as np

V = TypeVar("V")


@dataclass(frozen=True, order=False)
class TimeInterval:
    start: float
    end: float
    start_closed: bool = True
    end_closed: bool = True

    def __post_init__(self):
        if not self.start <= self.end:
            raise ValueError(f"interval start {self.start} > end {self.end}")
        if self.start == self.end and not (self.start_closed and self.end_closed):
            raise ValueError("a degenerate interval must be closed on both sides")

    @classmethod
    def closed(cls, start, end) -> "TimeInterval":
        return cls(float(start), float(end), True, True)

    @classmethod
    def half_open(cls, start, end) -> "TimeInterval":
        """``[start, end)``"""
        return cls(float(start), float(end), True, False)

    @classmethod
    def left_open(cls, start, end) -> "TimeInterval":
        """``(start, end]``"""
        return cls(float(start), float(end), False, True)

    @property
    def length(self) -> float:
        return self.end - self.start

    @property
    def is_instant(self) -> bool:
        return self.start == self.end

    def contains(self, t: float) -> bool:
        if t < self.start or t > self.end:
            return False
        if t == self.start and not self.start_closed:
            return False
        if t == self.end and not self.end_closed:
            return False
        return True

    def overlaps(self, other: "TimeInterval") -> bool:
        """True when the two intervals share at least one instant."""
        lo, hi = (self, other) if self._sort_key() <= other._sort_key() else (other, self)
        if hi.start < lo.end:
            return True
        if hi.start == lo.end:
            return lo.end_closed and hi.start_closed
        return False

    def touches(self, other: "TimeInterval") -> bool:
        """True when the union of the two intervals is a single interval."""
        if self.overlaps(other):
            return True
        lo, hi = (self, other) if self._sort_key() <= other._sort_key() else (other, self)
        return hi.start == lo.end and (lo.end_closed or hi.start_closed)

    def hull(self, other: "TimeInterval") -> "TimeInterval":
        if (self.start, not self.start_closed) <= (other.start, not other.start_closed):
            start, sc = self.start, self.start_closed
        else:
            start, sc = other.start, other.start_closed
        if (self.end, self.end_closed) >= (other.end, other.end_closed):
            end, ec = self.end, self.end_closed
        else:
            end, ec = other.end, other.end_closed
        return TimeInterval(start, end, sc, ec)

    def intersection(self, other: "TimeInterval") -> "TimeInterval | None":
        if not self.overlaps(other):
            return None
        if (self.start, not self.start_closed) >= (other.start, not other.start_closed):
            start, sc = self.start, self.start_closed
        else:
            start, sc = other.start, other.start_closed
        if (self.end, self.end_closed) <= (other.end, other.end_closed):
            end, ec = self.end, self.end_closed
        else:
            end, ec = other.end, other.end_closed
        return TimeInterval(start, end, sc, ec)

    def _sort_key(self):
        # closed starts sort before open starts at the same instant
        return (self.start, not self.start_closed)

    def __repr__(self):
        lb = "[" if self.start_closed else "("
        rb = "]" if self.end_closed else ")"
        return f"{lb}{self.start:g}, {self.end:g}{rb}"


def merge_intervals(intervals: Iterable[TimeInterval]) -> list[TimeInterval]:
    """Union of intervals as an ordered list of disjoint, non-touching intervals."""
    items = sorted(intervals, key=TimeInterval._sort_key)
    merged: list[TimeInterval] = []
    for iv in items:
        if merged and merged[-1].touches(iv):
            merged[-1] = merged[-1].hull(iv)
        else:
            merged.append(iv)
    return merged


@dataclass(frozen=True)
class ConstantPiece(Generic[V]):
    value: V

    def __call__(self, interval: TimeInterval, t: float) -> V:
        return self.value

    def left_value(self, interval):
        return self.value

    def right_value(self, interval):
        return self.value


@dataclass(frozen=True)
class LinearPiece:
    """Affine interpolation from ``start_value`` at the interval start to
    ``end_value`` at its end. Values are 2D points or scalars."""

    start_value: Any
    end_value: Any

    def __post_init__(self):
        object.__setattr__(self, "start_value", _as_value(self.start_value))
        object.__setattr__(self, "end_value", _as_value(self.end_value))

    def __call__(self, interval: TimeInterval, t: float):
        if interval.length == 0:
            return self.start_value
        frac = (t - interval.start) / interval.length
        return _lerp(self.start_value, self.end_value, frac)

    def left_value(self, interval):
        return self.start_value

    def right_value(self, interval):
        return self.end_value


def _as_value(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return tuple(float(x) for x in v)
    return float(v)


def _lerp(a, b, frac):
    if isinstance(a, tuple):
        return tuple(x + frac * (y - x) for x, y in zip(a, b))
    return a + frac * (b - a)


class OverlapError(ValueError):
    pass


class PiecewiseAttribute(Generic[V]):
    """Immutable map from disjoint time intervals to piece functions.

    Pieces are kept sorted by start; because they never overlap, binary
    search over the starts locates the only candidate piece for any time.
    """

    __slots__ = ("_pieces", "_keys", "default")

    def __init__(self, pieces: Iterable[tuple[TimeInterval, Any]] = (), default: V = None):
        items = sorted(pieces, key=lambda p: p[0]._sort_key())
        for (a, _), (b, _) in zip(items, items[1:]):
            if a.overlaps(b):
                raise OverlapError(f"pieces {a!r} and {b!r} overlap")
        self._pieces: tuple[tuple[TimeInterval, Any], ...] = tuple(items)
        self._keys = [iv._sort_key() for iv, _ in items]
        self.default = default

    @classmethod
    def constant(cls, value, intervals: Iterable[TimeInterval] = (), default=None):
        return cls(((iv, ConstantPiece(value)) for iv in intervals), default)

    @property
    def pieces(self) -> tuple[tuple[TimeInterval, Any], ...]:
        return self._pieces

    def __len__(self):
        return len(self._pieces)

    def __iter__(self):
        return iter(self._pieces)

    def with_piece(self, interval: TimeInterval, fn) -> "PiecewiseAttribute[V]":
        """Return a copy with one more piece; raises :class:`OverlapError`."""
        return PiecewiseAttribute(self._pieces + ((interval, fn),), self.default)

    def find(self, t: float) -> int:
        """Index of the piece containing ``t`` or -1."""
        # (t, False) sorts after a closed start at t and before an open one
        i = bisect.bisect_right(self._keys, (t, False)) - 1
        if i >= 0 and self._pieces[i][0].contains(t):
            return i
        return -1

    def value_at(self, t: float) -> V:
        i = self.find(t)
        if i < 0:
            return self.default
        iv, fn = self._pieces[i]
        return fn(iv, t)

    __call__ = value_at

    def breakpoints(self) -> list[float]:
        out = set()
        for iv, _ in self._pieces:
            out.add(iv.start)
            out.add(iv.end)
        return sorted(out)

    def __eq__(self, other):
        return (isinstance(other, PiecewiseAttribute) and self._pieces == other._pieces
                and self.default == other.default)

    def __repr__(self):
        body = ", ".join(f"{iv!r}: {fn!r}" for iv, fn in self._pieces)
        return f"PiecewiseAttribute({{{body}}}, default={self.default!r})"


def attribute_value(attr: PiecewiseAttribute, t: float):
    return attr.value_at(t)


def true_intervals(attr: PiecewiseAttribute) -> list[TimeInterval]:
    """Maximal intervals where a boolean attribute evaluates to true."""
    ivs = [iv for iv, fn in attr.pieces if fn(iv, iv.start)]
    if attr.default:
        raise ValueError("appearance with a true default has unbounded support")
    return merge_intervals(ivs)


def linear_scan_value(pieces: Sequence[tuple[TimeInterval, Any]], default, t):
    """Reference lookup used to cross-check :meth:`PiecewiseAttribute.value_at`."""
    for iv, fn in pieces:
        if iv.contains(t):
            return fn(iv, t)
    return default


def _nonempty(s, sc, e, ec) -> bool:
    return s < e or (s == e and sc and ec)


def subtract(interval: TimeInterval, covers: Sequence[TimeInterval]) -> list[TimeInterval]:
    """Parts of ``interval`` not covered by ``covers`` (sorted, disjoint)."""
    out = []
    s, sc = interval.start, interval.start_closed
    for c in covers:
        if not c.overlaps(interval):
            continue
        e, ec = c.start, not c.start_closed
        if _nonempty(s, sc, e, ec):
            out.append(TimeInterval(s, e, sc, ec))
        s, sc = c.end, not c.end_closed
    if _nonempty(s, sc, interval.end, interval.end_closed):
        out.append(TimeInterval(s, interval.end, sc, interval.end_closed))
    return out


def intersect_lists(a: Sequence[TimeInterval], b: Sequence[TimeInterval]) -> list[TimeInterval]:
    out = []
    for x in a:
        for y in b:
            z = x.intersection(y)
            if z is not None:
                out.append(z)
    return merge_intervals(out)
