"""Value types of the multi-scale structure: intervals, traps, walls, holes."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..exceptions import InvalidParameter

__all__ = [
    "Interval",
    "Direction",
    "TrapKind",
    "Trap",
    "WallValue",
    "Hole",
    "CondProbEstimate",
]


@dataclass(frozen=True, order=True)
class Interval:
    """Right-closed integer interval ``(a, b]``; ``a`` may be ``-1``."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < -1 or self.b <= self.a:
            raise InvalidParameter(f"bad interval ({self.a}, {self.b}]")

    @property
    def size(self) -> int:
        return self.b - self.a

    def __contains__(self, p: int) -> bool:
        return self.a < p <= self.b

    def contains(self, other: "Interval") -> bool:
        return self.a <= other.a and other.b <= self.b

    def intersects(self, other: "Interval") -> bool:
        return self.a < other.b and other.a < self.b

    def points(self) -> range:
        return range(self.a + 1, self.b + 1)


class Direction(int, Enum):
    """Axis of a wall: vertical walls live on ``X``, horizontal ones on ``Y``."""

    VERTICAL = 0
    HORIZONTAL = 1

    @property
    def other(self) -> "Direction":
        return Direction(1 - self.value)


class TrapKind(str, Enum):
    BASE = "base"
    UNCORRELATED = "uncorrelated"
    CORRELATED_1 = "correlated-1"
    CORRELATED_2 = "correlated-2"
    MISSING_HOLE = "missing-hole"


@dataclass(frozen=True, order=True)
class Trap:
    """Closed rectangle ``[x0, x1] x [y0, y1]``."""

    x0: int
    x1: int
    y0: int
    y1: int
    kind: TrapKind = field(default=TrapKind.BASE, compare=False)

    def __post_init__(self):
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise InvalidParameter("trap corners out of order")

    @property
    def size(self) -> int:
        return max(self.x1 - self.x0, self.y1 - self.y0)

    @property
    def start(self) -> tuple[int, int]:
        return self.x0, self.y0

    def distance_to(self, x: int, y: int) -> int:
        """Max-metric distance from a point to the nearest point of the trap."""
        dx = max(self.x0 - x, 0, x - self.x1)
        dy = max(self.y0 - y, 0, y - self.y1)
        return max(dx, dy)


@dataclass(frozen=True)
class WallValue:
    """Body ``(a, b]`` plus rank on one axis.

    ``status`` is ``"wall"`` or ``"barrier"``; every wall is also a barrier.
    ``kind`` is ``emerging-j``, ``compound<r1,r2,i>`` or ``inherited``.
    """

    body: Interval
    rank: float
    direction: Direction
    status: str = "barrier"
    kind: str = "emerging-1"

    def __post_init__(self):
        if self.status not in ("barrier", "wall"):
            raise InvalidParameter(f"unknown wall status {self.status!r}")
        if self.rank <= 0:
            raise InvalidParameter("rank must be positive")

    @property
    def is_wall(self) -> bool:
        return self.status == "wall"

    @property
    def start(self) -> int:
        return self.body.a

    @property
    def end(self) -> int:
        return self.body.b

    @property
    def size(self) -> int:
        return self.body.size

    def as_wall(self) -> "WallValue":
        return WallValue(self.body, self.rank, self.direction, "wall", self.kind)

    def as_barrier(self) -> "WallValue":
        return WallValue(self.body, self.rank, self.direction, "barrier", self.kind)

    def key(self) -> tuple:
        return (self.direction.value, self.body.a, self.body.b, self.rank, self.kind)


@dataclass(frozen=True)
class Hole:
    """Transversal interval through which a confined path crosses ``wall``."""

    interval: Interval
    wall: WallValue
    good: bool


@dataclass(frozen=True)
class CondProbEstimate:
    value: float
    mode: str
    samples: int
    ci_low: float
    ci_high: float

    def __post_init__(self):
        if self.mode not in ("exact", "monte-carlo"):
            raise InvalidParameter(f"unknown estimate mode {self.mode!r}")
        if self.mode == "exact" and not (self.ci_low == self.value == self.ci_high):
            raise InvalidParameter("exact estimates have a degenerate interval")

    @property
    def standard_error(self) -> float:
        if self.mode == "exact" or self.samples == 0:
            return 0.0
        p = self.value
        return (p * (1 - p) / self.samples) ** 0.5
