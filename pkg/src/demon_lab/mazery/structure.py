"""The level-k structure: sequences, window, traps, walls, barriers, cleanness."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..exceptions import InvalidParameter
from ..params import LevelParams, toy_level_params
from ..percolation import _values
from .cleanness import CleannessRelations, base_cleanness, boxes_near
from .objects import Direction, Trap, TrapKind, WallValue

__all__ = [
    "BaseTraps",
    "ExplicitTraps",
    "Mazery",
    "base_mazery",
    "base_params",
]


class BaseTraps:
    """Point traps ``(i, j)`` with ``X(i) = Y(j)``, computed on demand."""

    complete = True
    substitutable = True

    def __init__(self, x: np.ndarray, y: np.ndarray):
        self.x, self.y = x, y

    def closed_grid(self, x0: int, x1: int, y0: int, y1: int) -> np.ndarray:
        """Boolean ``[i - x0, j - y0]`` grid of closed points (clipped to the sequences)."""
        x1, y1 = min(x1, len(self.x) - 1), min(y1, len(self.y) - 1)
        x0, y0 = max(x0, 0), max(y0, 0)
        if x0 > x1 or y0 > y1:
            return np.zeros((0, 0), dtype=bool)
        return self.x[x0:x1 + 1, None] == self.y[None, y0:y1 + 1]

    def traps_in(self, x0: int, x1: int, y0: int, y1: int) -> list[Trap]:
        grid = self.closed_grid(x0, x1, y0, y1)
        ox, oy = max(x0, 0), max(y0, 0)
        return [Trap(int(i) + ox, int(i) + ox, int(j) + oy, int(j) + oy, TrapKind.BASE)
                for i, j in zip(*np.nonzero(grid))]

    def has_trap_in(self, x0, x1, y0, y1) -> bool:
        return bool(self.closed_grid(x0, x1, y0, y1).any())

    def boxes_in(self, x0, x1, y0, y1) -> np.ndarray:
        ii, jj = np.nonzero(self.closed_grid(x0, x1, y0, y1))
        ii, jj = ii + max(x0, 0), jj + max(y0, 0)
        return np.stack([ii, ii, jj, jj], axis=1).astype(np.int64).reshape(-1, 4)

    def near_trap(self, q, box, ux, uy, g) -> bool:
        return boxes_near(self.boxes_in(*box), q, ux, uy, g)

    def with_sequences(self, x, y) -> "BaseTraps":
        return BaseTraps(x, y)


class ExplicitTraps:
    """A fixed trap list, for fixtures and reloaded dumps."""

    substitutable = True

    def __init__(self, traps=(), complete: bool = True):
        self.traps = sorted(traps)
        self.complete = complete

    def traps_in(self, x0, x1, y0, y1) -> list[Trap]:
        return [t for t in self.traps
                if x0 <= t.x0 and t.x1 <= x1 and y0 <= t.y0 and t.y1 <= y1]

    def has_trap_in(self, x0, x1, y0, y1) -> bool:
        return bool(self.traps_in(x0, x1, y0, y1))

    def with_sequences(self, x, y) -> "ExplicitTraps":
        return self


@dataclass
class Mazery:
    """Level-``k`` structure over the core window ``[lo, hi)`` of both axes.

    ``barriers`` and ``walls`` hold materialized objects per direction (walls
    are a subset of barriers). ``lazy_barriers`` optionally describes a barrier
    family too large to list. ``rules`` maps a barrier key to a predicate of the
    body's values; such barriers are re-decided when a sequence is
    substituted. ``notes`` records detectors that could not run.
    """

    level: int
    params: LevelParams
    x: np.ndarray
    y: np.ndarray
    window: tuple[int, int]
    m: int
    traps: object
    barriers: dict = field(default_factory=dict)
    walls: dict = field(default_factory=dict)
    cleanness: CleannessRelations = field(default_factory=base_cleanness)
    loops: bool = False
    lower: "Mazery | None" = None
    lazy_barriers: dict = field(default_factory=dict)
    rules: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    erasures: list = field(default_factory=list)

    def __post_init__(self):
        for d in Direction:
            self.barriers.setdefault(d, [])
            self.walls.setdefault(d, [])
            self.barriers[d] = sorted(self.barriers[d], key=_order)
            self.walls[d] = sorted(self.walls[d], key=_order)
        lo, hi = self.window
        if not 0 <= lo <= hi <= min(len(self.x), len(self.y)):
            raise InvalidParameter("window must lie within the sequences")

    def seq(self, d: Direction) -> np.ndarray:
        return self.x if Direction(d) is Direction.VERTICAL else self.y

    @property
    def core(self) -> tuple[int, int]:
        return self.window

    def light(self, w: WallValue) -> bool:
        return w.rank < self.params.R_star

    def all_traps(self, region=None) -> list[Trap]:
        lo, hi = self.window
        x0, x1, y0, y1 = region or (lo, hi - 1, lo, hi - 1)
        return self.traps.traps_in(x0, x1, y0, y1)

    def substitute(self, d: Direction, start: int, values) -> "Mazery":
        """Copy with ``values`` written into one sequence from ``start`` on.

        Traps must be recomputable from the sequences; barriers carrying a
        rule are re-decided, the others are kept as they are.
        """
        if not getattr(self.traps, "substitutable", False):
            raise InvalidParameter("traps of this level cannot be recomputed")
        x, y = self.x.copy(), self.y.copy()
        target = x if Direction(d) is Direction.VERTICAL else y
        values = np.asarray(values, dtype=np.int64)
        target[start:start + len(values)] = values
        keep = {}
        for kind, table in (("barriers", self.barriers), ("walls", self.walls)):
            keep[kind] = {}
            for dd in Direction:
                seq = x if dd is Direction.VERTICAL else y
                keep[kind][dd] = [w for w in table[dd]
                                  if w.key() not in self.rules
                                  or self.rules[w.key()](seq[w.start + 1:w.end + 1])]
        return replace(self, x=x, y=y, traps=self.traps.with_sequences(x, y),
                       barriers=keep["barriers"], walls=keep["walls"], notes=list(self.notes))

    def summary(self) -> dict:
        out = {"level": self.level, "window": self.window}
        for d in Direction:
            out[f"{d.name.lower()}_walls"] = len(self.walls[d])
            out[f"{d.name.lower()}_barriers"] = len(self.barriers[d])
        return out


def _order(w: WallValue):
    return (w.start, w.end, w.rank, w.kind)


def base_params(w: float, R: float = 28.0, f: float = 4, g: float = 2, q: float = 0.05,
                Delta_star: float = 32) -> LevelParams:
    """Level-1 toy parameters: ``Delta = 1``, ``sigma = 0``."""
    return toy_level_params(Delta=1, f=f, g=g, w=w, q=q, R=R, sigma=0.0, k=1,
                            Delta_star=Delta_star)


def base_mazery(x_seq, y_seq, window, w: float, m: int | None = None, loops: bool = False,
                params: LevelParams | None = None) -> Mazery:
    """Level-1 structure: point traps, no walls, everything clean.

    ``window`` is either the side ``n`` (core ``[0, n)``) or a pair ``(lo, hi)``.
    """
    xv, yv = _values(x_seq), _values(y_seq)
    if m is None:
        m = int(max(xv.max(initial=1), yv.max(initial=1)))
        m = max(m, 2)
    if not loops and m >= 2 and not (1 / (m - 1) < w < 1):
        raise InvalidParameter(f"w={w} must lie strictly between 1/(m-1) and 1")
    if loops and not (1 / m < w < 1):
        raise InvalidParameter(f"w={w} must lie strictly between 1/m and 1")
    lo, hi = (0, int(window)) if np.isscalar(window) else (int(window[0]), int(window[1]))
    if hi > min(len(xv), len(yv)):
        raise InvalidParameter("window exceeds the sequences")
    params = params or base_params(w)
    if params.Delta != 1 or params.sigma != 0 or not math.isclose(params.w, w):
        params = replace(params, Delta=1, sigma=0.0, w=w)
    return Mazery(level=1, params=params, x=xv.astype(np.int64), y=yv.astype(np.int64),
                  window=(lo, hi), m=m, traps=BaseTraps(xv.astype(np.int64), yv.astype(np.int64)),
                  loops=loops)
