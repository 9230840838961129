"""Holes through walls: confined crossings of a wall's strip, and their goodness."""
from __future__ import annotations

from ..percolation import box_reach_rows
from .cleanness import Rect
from .objects import Direction, Hole, Interval, WallValue

__all__ = ["iter_holes", "find_hole", "hole_is_good"]


def _crossings(M, wall: WallValue, d: int, t_max: int) -> list[int]:
    """Ends ``t`` such that the strip is crossed from transversal ``d`` to ``t``."""
    a1, b1 = wall.start, wall.end
    if wall.direction is Direction.HORIZONTAL:
        # vertical hole: left-open rectangle (d, t] x [a1, b1]
        rows = box_reach_rows(M.x, M.y, d, t_max, a1, b1, skip_first_col=True)
        last = rows[-1]
        return [d + k for k in range(1, t_max - d + 1) if (last >> k) & 1]
    # horizontal hole: bottom-open rectangle [a1, b1] x (d, t]
    rows = box_reach_rows(M.x, M.y, a1, b1, d, t_max, skip_first_row=True)
    col = b1 - a1
    return [d + k for k in range(1, t_max - d + 1) if (rows[k] >> col) & 1]


def hole_is_good(M, wall: WallValue, hole: Interval) -> bool:
    """Both crossing corners are H-clean as seen from their side of the wall.

    The entry corner must be H-clean as the end of every rectangle reaching
    it from the lower left (opening toward the hole's axis), the exit corner
    as the start of every such rectangle going up and right.
    """
    C = M.cleanness
    r = C.reach
    d, t = hole.a, hole.b
    if wall.direction is Direction.HORIZONTAL:
        a, b = (d, wall.start), (t, wall.end)
        kind, proj = "left-open", Direction.VERTICAL
        pa, pb = a[0], b[0]
    else:
        a, b = (wall.start, d), (wall.end, t)
        kind, proj = "bottom-open", Direction.HORIZONTAL
        pa, pb = a[1], b[1]
    q_in = Rect(max(0, a[0] - r), a[0], max(0, a[1] - r), a[1], kind)
    q_out = Rect(b[0], b[0] + r, b[1], b[1] + r, kind)
    return (C.trap_clean("end", q_in) and C.left_clean(proj, pa, strong=True)
            and C.trap_clean("start", q_out) and C.right_clean(proj, pb, strong=True))


def iter_holes(M, wall: WallValue, search: Interval):
    """All holes ``(d, t] ⊆ search`` with ``t - d <= |wall|``, left to right."""
    if wall.direction is Direction.HORIZONTAL:
        limit = len(M.x) - 1
    else:
        limit = len(M.y) - 1
    for d in range(search.a, search.b):
        if d < 0:
            continue
        t_max = min(d + wall.size, search.b, limit)
        if t_max <= d:
            continue
        for t in _crossings(M, wall, d, t_max):
            iv = Interval(d, t)
            yield Hole(iv, wall, hole_is_good(M, wall, iv))


def find_hole(M, wall: WallValue, search: Interval) -> Hole | None:
    """The leftmost hole through ``wall`` inside ``search``, or None."""
    return next(iter_holes(M, wall, search), None)
