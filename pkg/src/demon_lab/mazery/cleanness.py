"""Cleanness, strong cleanness and trap-cleanness relations.

A relation for level ``k+1`` is the level-``k`` relation plus two rules: an
endpoint ``x`` of ``I`` stays clean unless ``I`` contains a level-``k`` wall
whose near end is closer to ``x`` than ``f/3`` (barriers instead of walls for
strong cleanness), and a corner stays trap-clean in a rectangle ``Q`` unless a
level-``k`` trap contained in ``Q`` lies within distance ``g`` of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .objects import Direction, Trap

__all__ = ["WallIndex", "Rect", "CleannessRelations", "base_cleanness", "scale_cleanness",
           "boxes_near"]


class WallIndex:
    """Bodies ``(s, e]`` of one direction, indexed for near-end queries."""

    def __init__(self, bodies=()):
        pairs = sorted((int(s), int(e)) for s, e in bodies)
        self.by_end = np.array(sorted(pairs, key=lambda p: p[1]), dtype=np.int64).reshape(-1, 2)
        self.by_start = np.array(pairs, dtype=np.int64).reshape(-1, 2)

    def __len__(self):
        return len(self.by_start)

    def right_hit(self, a: int, b: int, dist: float) -> bool:
        """Some body inside ``(a, b]`` has its right end closer than ``dist`` to ``b``."""
        ends = self.by_end[:, 1]
        lo = np.searchsorted(ends, b - dist, side="right")
        hi = np.searchsorted(ends, b, side="right")
        return bool(np.any(self.by_end[lo:hi, 0] >= a))

    def left_hit(self, a: int, b: int, dist: float) -> bool:
        """Some body inside ``(a, b]`` has its left end closer than ``dist`` to ``a``."""
        starts = self.by_start[:, 0]
        lo = np.searchsorted(starts, a, side="left")
        hi = np.searchsorted(starts, a + dist, side="left")
        return bool(np.any(self.by_start[lo:hi, 1] <= b))


@dataclass(frozen=True)
class Rect:
    """Rectangle ``[x0, x1] x [y0, y1]``, optionally left-open or bottom-open."""

    x0: int
    x1: int
    y0: int
    y1: int
    kind: str = "closed"

    def contains_trap(self, t: Trap) -> bool:
        lx = self.x0 + (self.kind == "left-open")
        ly = self.y0 + (self.kind == "bottom-open")
        return lx <= t.x0 and t.x1 <= self.x1 and ly <= t.y0 and t.y1 <= self.y1

    @property
    def start(self) -> tuple[int, int]:
        return self.x0, self.y0

    @property
    def end(self) -> tuple[int, int]:
        return self.x1, self.y1


def boxes_near(boxes: np.ndarray, q: "Rect", ux: int, uy: int, g: float) -> bool:
    """Some box ``(x0, x1, y0, y1)`` lies inside ``q`` within distance ``g`` of ``(ux, uy)``."""
    if not len(boxes):
        return False
    x0, x1, y0, y1 = boxes.T
    lx = q.x0 + (q.kind == "left-open")
    ly = q.y0 + (q.kind == "bottom-open")
    inside = (x0 >= lx) & (x1 <= q.x1) & (y0 >= ly) & (y1 <= q.y1)
    dist = np.maximum(np.maximum(np.maximum(x0 - ux, 0), ux - x1),
                      np.maximum(np.maximum(y0 - uy, 0), uy - y1))
    return bool(np.any(inside & (dist < g)))


@dataclass
class CleannessRelations:
    """Clean/strongly-clean predicates per direction and trap-cleanness.

    ``walls``/``barriers`` hold the lower level's bodies per direction and
    ``traps`` its trap provider; all three are empty at the base level, where
    every point is clean in every sense. ``reach`` bounds how far away an
    object can be and still matter, so "clean in every interval ending at x"
    is decided on the interval of that length.
    """

    lower: "CleannessRelations | None" = None
    f: float = 0.0
    g: float = 0.0
    Delta: float = 1.0
    walls: dict = field(default_factory=dict)
    barriers: dict = field(default_factory=dict)
    traps: object = None
    unclean: dict = field(default_factory=dict)

    def __post_init__(self):
        for d in Direction:
            self.walls.setdefault(d, WallIndex())
            self.barriers.setdefault(d, WallIndex())
            self.unclean.setdefault(d, set())

    @property
    def reach(self) -> int:
        own = math.ceil(self.f / 3 + self.Delta) + 1 if self.f else 1
        trap = math.ceil(self.g + self.Delta) + 1 if self.g else 1
        below = self.lower.reach if self.lower else 1
        return max(own, trap, below)

    def mark_unclean(self, direction: Direction, x: int) -> None:
        """Declare ``x`` unclean as an endpoint of every interval (fault injection)."""
        self.unclean[Direction(direction)].add(int(x))

    # one-dimensional relations
    def _ok(self, d, a, b, strong, right):
        d = Direction(d)
        x = b if right else a
        if x in self.unclean[d]:
            return False
        if self.lower is not None and not self.lower._ok(d, a, b, strong, right):
            return False
        if not self.f:
            return True
        index = (self.barriers if strong else self.walls)[d]
        if not len(index):
            return True
        hit = index.right_hit if right else index.left_hit
        return not hit(a, b, self.f / 3)

    def clean_right(self, d, a: int, b: int) -> bool:
        """``b`` is clean in ``(a, b]``."""
        return self._ok(d, a, b, False, True)

    def clean_left(self, d, a: int, b: int) -> bool:
        """``a`` is clean in ``(a, b]``."""
        return self._ok(d, a, b, False, False)

    def strong_right(self, d, a: int, b: int) -> bool:
        return self._ok(d, a, b, True, True) and self._ok(d, a, b, False, True)

    def strong_left(self, d, a: int, b: int) -> bool:
        return self._ok(d, a, b, True, False) and self._ok(d, a, b, False, False)

    def inner_clean(self, d, a: int, b: int) -> bool:
        return self.clean_left(d, a, b) and self.clean_right(d, a, b)

    def left_clean(self, d, x: int, strong: bool = False) -> bool:
        """Clean in every interval ``(a, x]``."""
        a = max(-1, x - self.reach)
        if a >= x:
            return True
        return self.strong_right(d, a, x) if strong else self.clean_right(d, a, x)

    def right_clean(self, d, x: int, strong: bool = False) -> bool:
        """Clean in every interval ``(x, b]``."""
        b = x + self.reach
        return self.strong_left(d, x, b) if strong else self.clean_left(d, x, b)

    def clean_point(self, d, x: int) -> bool:
        return self.left_clean(d, x) and self.right_clean(d, x)

    # two-dimensional relations
    def trap_clean(self, corner: str, q: Rect) -> bool:
        """Corner ``"start"`` or ``"end"`` of ``q`` is trap-clean in ``q``."""
        if self.lower is not None and not self.lower.trap_clean(corner, q):
            return False
        if not self.g or self.traps is None:
            return True
        ux, uy = q.start if corner == "start" else q.end
        r = math.ceil(self.g + self.Delta)
        box = (max(q.x0, ux - r), min(q.x1, ux + r), max(q.y0, uy - r), min(q.y1, uy + r))
        if box[0] > box[1] or box[2] > box[3]:
            return True
        near = getattr(self.traps, "near_trap", None)
        if near is not None:
            return not near(q, box, ux, uy, self.g)
        for t in self.traps.traps_in(*box):
            if q.contains_trap(t) and t.distance_to(ux, uy) < self.g:
                return False
        return True

    def upper_right_clean(self, x: int, y: int, limit: tuple[int, int] | None = None) -> bool:
        """Clean as the start of every closed rectangle (within ``limit``)."""
        r = self.reach
        x1, y1 = x + r, y + r
        if limit is not None:
            x1, y1 = min(x1, limit[0]), min(y1, limit[1])
        return (self.right_clean(Direction.VERTICAL, x) and self.right_clean(Direction.HORIZONTAL, y)
                and self.trap_clean("start", Rect(x, x1, y, y1)))

    def lower_left_clean(self, x: int, y: int) -> bool:
        r = self.reach
        return (self.left_clean(Direction.VERTICAL, x) and self.left_clean(Direction.HORIZONTAL, y)
                and self.trap_clean("end", Rect(max(0, x - r), x, max(0, y - r), y)))


def base_cleanness() -> CleannessRelations:
    return CleannessRelations()


def scale_cleanness(M) -> CleannessRelations:
    """Relations of the next level, built from ``M``'s walls, barriers and traps."""
    p = M.params
    walls = {d: WallIndex((w.start, w.end) for w in M.walls[d]) for d in Direction}
    barriers = {d: WallIndex((w.start, w.end) for w in M.barriers[d]) for d in Direction}
    return CleannessRelations(lower=M.cleanness, f=p.f, g=p.g, Delta=p.Delta, walls=walls,
                              barriers=barriers, traps=M.traps)
