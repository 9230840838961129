"""Closed points, oriented reachability and escape statistics on the lattice.

Point ``(i, j)`` pairs ``X(i)`` with ``Y(j)`` and is closed when the two colors
agree. Paths move right (``i+1``) or up (``j+1``) and may not enter a closed
point; the starting point itself is allowed to be closed.

Rows are bit-packed into Python integers: bit ``i`` of row ``j`` is cell
``(i, j)``. Filling a row from its seeds is a single carry-propagating
addition, so a whole ``n x n`` table costs ``O(n)`` big-integer operations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import InvalidParameter
from .walks import BitSequence, ColorSequence

__all__ = [
    "LatticePoint",
    "RectKind",
    "RectSpec",
    "ReachSet",
    "BlockingRecord",
    "LEFT",
    "BELOW",
    "NONE",
    "closed_point",
    "reach_set",
    "reachable_in_rect",
    "box_reach_rows",
    "escape_record",
    "escape_flags_batch",
    "binary_compatible",
    "binary_reach_rows",
    "row_fill",
    "row_bits",
]

NONE, LEFT, BELOW = 0, 1, 2


def _values(seq) -> np.ndarray:
    if isinstance(seq, (ColorSequence, BitSequence)):
        return seq.values
    return np.asarray(seq, dtype=np.int64)


def row_fill(open_mask: int, seeds: int) -> int:
    """Cells reachable by rightward moves from ``seeds`` through ``open_mask``.

    Seeds are always reachable; every other reached cell lies in ``open_mask``.
    """
    s = seeds & open_mask
    return (((open_mask + s) ^ open_mask) & open_mask) | seeds


def row_bits(row: int, width: int) -> np.ndarray:
    """Bit-packed row to a boolean vector of length ``width``."""
    nbytes = (width + 7) // 8
    raw = np.frombuffer(row.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:width].astype(bool)


def _color_masks(xv: np.ndarray) -> dict[int, int]:
    """Map color ``c`` to the bit mask of positions ``i`` with ``X(i) = c``."""
    masks: dict[int, int] = {}
    for c in np.unique(xv):
        bits = np.packbits(xv == c, bitorder="little").tobytes()
        masks[int(c)] = int.from_bytes(bits, "little")
    return masks


@dataclass(frozen=True, order=True)
class LatticePoint:
    x: int
    y: int

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise InvalidParameter("lattice coordinates must be nonnegative")

    def dist(self, other: "LatticePoint") -> int:
        """Distance in the max metric."""
        return max(abs(self.x - other.x), abs(self.y - other.y))


class RectKind(str, Enum):
    CLOSED = "closed"
    LEFT_OPEN = "left-open"
    BOTTOM_OPEN = "bottom-open"


@dataclass(frozen=True)
class RectSpec:
    """Rectangle spanned by ``start`` and ``end``.

    ``closed`` is ``[a0,b0] x [a1,b1]``; ``left-open`` drops the column
    ``x = a0``; ``bottom-open`` drops the row ``y = a1``.
    """

    start: LatticePoint
    end: LatticePoint
    kind: RectKind = RectKind.CLOSED

    def __post_init__(self):
        object.__setattr__(self, "kind", RectKind(self.kind))
        if self.start.x > self.end.x or self.start.y > self.end.y:
            raise InvalidParameter("rectangle start must not exceed its end")

    def contains(self, p: LatticePoint) -> bool:
        x_ok = self.start.x <= p.x <= self.end.x
        y_ok = self.start.y <= p.y <= self.end.y
        if self.kind is RectKind.LEFT_OPEN:
            x_ok = x_ok and p.x > self.start.x
        elif self.kind is RectKind.BOTTOM_OPEN:
            y_ok = y_ok and p.y > self.start.y
        return x_ok and y_ok


@dataclass(eq=False)
class ReachSet:
    """Reachability from the origin over ``[0, n]^2``.

    ``reach[i, j]`` and ``witness[i, j]`` are indexed by the ``X`` position
    first. ``witness`` holds ``LEFT`` or ``BELOW`` for the predecessor used by a
    reached cell and ``NONE`` for the origin and for unreached cells.
    """

    n: int
    reach: np.ndarray = field(repr=False)
    witness: np.ndarray = field(repr=False)
    rows: list[int] = field(repr=False, default_factory=list)

    def is_reachable(self, i: int, j: int) -> bool:
        return bool(self.reach[i, j])

    def path_to(self, i: int, j: int) -> list[str]:
        """Step list (``"R"``/``"U"``) of a witness path from the origin."""
        if not self.reach[i, j]:
            raise InvalidParameter(f"cell ({i}, {j}) is not reachable")
        steps = []
        while (i, j) != (0, 0):
            if self.witness[i, j] == LEFT:
                steps.append("R")
                i -= 1
            else:
                steps.append("U")
                j -= 1
        steps.reverse()
        return steps

    def escape_target(self) -> tuple[int, int] | None:
        """Some reached cell on the far boundary ``max(i, j) = n``, if any."""
        n = self.n
        col = np.flatnonzero(self.reach[n, :])
        if col.size:
            return n, int(col[0])
        row = np.flatnonzero(self.reach[:, n])
        if row.size:
            return int(row[0]), n
        return None


@dataclass(frozen=True)
class BlockingRecord:
    """``escape_flags[n-1]`` tells whether the origin escapes ``[0, n]^2``."""

    n_max: int
    escape_flags: tuple[bool, ...]

    def escape(self, n: int) -> bool:
        if not 1 <= n <= self.n_max:
            raise InvalidParameter(f"n={n} outside 1..{self.n_max}")
        return self.escape_flags[n - 1]

    def blocking_distance(self) -> int | None:
        """Smallest ``n`` at which escape fails, or None if it never fails."""
        for n, ok in enumerate(self.escape_flags, start=1):
            if not ok:
                return n
        return None


def closed_point(x_seq, y_seq, i: int, j: int) -> bool:
    xv, yv = _values(x_seq), _values(y_seq)
    if not (0 <= i < len(xv) and 0 <= j < len(yv)):
        raise InvalidParameter(f"point ({i}, {j}) outside the sequences")
    return bool(xv[i] == yv[j])


def box_reach_rows(xv, yv, i0: int, i1: int, j0: int, j1: int, start_i: int | None = None,
                   skip_first_col: bool = False, skip_first_row: bool = False) -> list[int]:
    """Rows ``j0..j1`` of the reach table over the box ``[i0, i1] x [j0, j1]``.

    The path starts at ``(start_i, j0)`` (default ``i0``), which counts as
    reached whatever its color. Bit ``k`` of each row stands for column
    ``i0 + k``. ``skip_first_col``/``skip_first_row`` forbid entering column
    ``i0`` or row ``j0`` after the start.
    """
    width = i1 - i0 + 1
    full = (1 << width) - 1
    masks = _color_masks(np.asarray(xv[i0:i1 + 1]))
    seed = 1 << ((i0 if start_i is None else start_i) - i0)
    col0_block = full ^ 1 if skip_first_col else full
    rows = []
    prev = 0
    for j in range(j0, j1 + 1):
        open_row = full & ~masks.get(int(yv[j]), 0)
        if j == j0:
            row = seed if skip_first_row else row_fill((open_row & col0_block) | seed, seed)
        else:
            open_row &= col0_block
            row = row_fill(open_row, open_row & prev)
        rows.append(row)
        prev = row
    return rows


def reach_set(x_seq, y_seq, n: int) -> ReachSet:
    """Reachability table from ``(0, 0)`` over ``[0, n]^2`` with witnesses."""
    xv, yv = _values(x_seq), _values(y_seq)
    if n < 0 or len(xv) < n + 1 or len(yv) < n + 1:
        raise InvalidParameter("sequences must have length at least n+1")
    rows = box_reach_rows(xv, yv, 0, n, 0, n)
    reach = np.stack([row_bits(r, n + 1) for r in rows], axis=1)
    witness = np.zeros_like(reach, dtype=np.int8)
    from_left = np.zeros_like(reach)
    from_left[1:, :] = reach[:-1, :]
    witness[reach & from_left] = LEFT
    witness[reach & ~from_left] = BELOW
    witness[0, 0] = NONE
    return ReachSet(n=n, reach=reach, witness=witness, rows=rows)


def reachable_in_rect(x_seq, y_seq, rect: RectSpec, confined: bool = True) -> bool:
    """Whether an open oriented path runs from ``rect.start`` to ``rect.end``.

    Oriented paths between two points never leave their bounding box, so the
    unconfined variant only differs by readmitting the excluded open side.
    """
    xv, yv = _values(x_seq), _values(y_seq)
    if not isinstance(rect, RectSpec):
        raise InvalidParameter("rect must be a RectSpec")
    a, b = rect.start, rect.end
    if b.x >= len(xv) or b.y >= len(yv):
        raise InvalidParameter("rectangle exceeds the sequences")
    if a == b:
        return True
    skip_col = confined and rect.kind is RectKind.LEFT_OPEN
    skip_row = confined and rect.kind is RectKind.BOTTOM_OPEN
    rows = box_reach_rows(xv, yv, a.x, b.x, a.y, b.y,
                          skip_first_col=skip_col, skip_first_row=skip_row)
    return bool((rows[-1] >> (b.x - a.x)) & 1)


def escape_record(x_seq, y_seq, n_max: int) -> BlockingRecord:
    """Escape flags for ``1 <= n <= n_max`` from one reachability pass."""
    xv, yv = _values(x_seq), _values(y_seq)
    if n_max < 1:
        raise InvalidParameter("n_max must be at least 1")
    if len(xv) < n_max + 1 or len(yv) < n_max + 1:
        raise InvalidParameter("sequences must have length at least n_max+1")
    return BlockingRecord(n_max, tuple(_escape_flags(xv, yv, n_max)))


def _escape_flags(xv, yv, n_max: int) -> list[bool]:
    width = n_max + 1
    full = (1 << width) - 1
    masks = _color_masks(xv[:width])
    prev = row_fill((full & ~masks.get(int(yv[0]), 0)) | 1, 1)
    seen = prev
    flags = []
    for n in range(1, n_max + 1):
        if prev:
            open_row = full & ~masks.get(int(yv[n]), 0)
            row = row_fill(open_row, open_row & prev)
        else:
            row = 0
        seen |= row
        flags.append(bool((seen >> n) & 1) or bool(row & ((1 << (n + 1)) - 1)))
        prev = row
    return flags


def escape_flags_batch(x_rows: np.ndarray, y_rows: np.ndarray, n_max: int) -> np.ndarray:
    """Escape flags for many instances; row ``k`` covers ``n = 1..n_max``."""
    out = np.zeros((len(x_rows), n_max), dtype=bool)
    for k in range(len(x_rows)):
        out[k] = _escape_flags(x_rows[k], y_rows[k], n_max)
    return out


def binary_reach_rows(z0, z1, n: int, emit_first: bool = False) -> list[int]:
    """Alignment DP rows: bit ``i`` of row ``j`` is state ``(i, j)`` reachable.

    State ``(i, j)`` means ``i`` symbols of ``z0`` and ``j`` of ``z1`` have
    been consumed. With ``emit_first`` the opening move must consume both
    first symbols together.
    """
    a, b = _values(z0), _values(z1)
    if n < 0 or len(a) < n or len(b) < n:
        raise InvalidParameter("sequences must have length at least n")
    full = (1 << (n + 1)) - 1
    below_n = (1 << n) - 1
    zeros0 = int.from_bytes(np.packbits(a[:n] == 0, bitorder="little").tobytes(), "little")
    zeros0 &= below_n

    def close(seeds: int) -> int:
        return (seeds | (row_fill(zeros0, seeds & zeros0) << 1)) & full

    rows = []
    if emit_first:
        if n == 0:
            return [1]
        rows.append(1)
        pending = 2 if not (a[0] == 1 and b[0] == 1) else 0
        for j in range(1, n + 1):
            row = close(pending)
            if j < n:
                diag = (row & (below_n if b[j] == 0 else zeros0)) << 1
                vert = row if b[j] == 0 else 0
                pending = (diag | vert) & full
            rows.append(row)
        return rows
    row = close(1)
    rows.append(row)
    for j in range(n):
        diag = (row & (below_n if b[j] == 0 else zeros0)) << 1
        vert = row if b[j] == 0 else 0
        row = close((diag | vert) & full)
        rows.append(row)
    return rows


def binary_compatible(z0, z1, n: int) -> bool:
    """Whether ``n`` symbols of each sequence can be aligned without a 1-1 pair."""
    rows = binary_reach_rows(z0, z1, n)
    return bool((rows[n] >> n) & 1)
