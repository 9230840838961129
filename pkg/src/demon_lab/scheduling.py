"""Delay schedules: extraction from lattice paths and collision checks.

One lattice step takes one time unit. A walk occupies state ``n`` during
``[t(n), t(n+1))``, so a path avoiding closed points is a collision-free
schedule and vice versa.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path as FsPath

import numpy as np

from .exceptions import InvalidParameter
from .percolation import _values, binary_reach_rows, reach_set

__all__ = [
    "Path",
    "Schedule",
    "path_to_schedule",
    "verify_no_collision",
    "verify_no_collision_literal",
    "verify_binary_schedule",
    "extract_schedule",
    "extract_binary_schedule",
    "format_schedule",
    "parse_schedule",
    "write_schedule",
    "read_schedule",
]

RIGHT, UP = "R", "U"


@dataclass(frozen=True)
class Path:
    """Oriented lattice path from the origin as a string of ``R``/``U`` steps."""

    steps: tuple[str, ...] = ()

    def __post_init__(self):
        steps = tuple(self.steps)
        if any(s not in (RIGHT, UP) for s in steps):
            raise InvalidParameter("path steps must be 'R' or 'U'")
        object.__setattr__(self, "steps", steps)

    def points(self) -> list[tuple[int, int]]:
        pts = [(0, 0)]
        for s in self.steps:
            i, j = pts[-1]
            pts.append((i + 1, j) if s == RIGHT else (i, j + 1))
        return pts


@dataclass(frozen=True)
class Schedule:
    t0: tuple[int, ...]
    t1: tuple[int, ...]

    def __post_init__(self):
        for name in ("t0", "t1"):
            seq = tuple(int(v) for v in getattr(self, name))
            if not seq or seq[0] != 0:
                raise InvalidParameter(f"{name} must start with 0")
            if any(b <= a for a, b in zip(seq, seq[1:])):
                raise InvalidParameter(f"{name} must be strictly increasing")
            object.__setattr__(self, name, seq)

    def __getitem__(self, a: int) -> tuple[int, ...]:
        return (self.t0, self.t1)[a]


def path_to_schedule(path: Path | list[str] | str) -> Schedule:
    """``t_d(n)`` is the first step index at which coordinate ``d`` equals ``n``."""
    if not isinstance(path, Path):
        path = Path(tuple(path))
    t0, t1 = [0], [0]
    for s, step in enumerate(path.steps, start=1):
        (t0 if step == RIGHT else t1).append(s)
    return Schedule(tuple(t0), tuple(t1))


def _check_cover(z, t, name):
    if len(t) > len(z):
        raise InvalidParameter(f"schedule {name} is longer than its sequence")


def verify_no_collision(z0, z1, sched: Schedule) -> bool:
    """No ``(a, n, k)`` with ``t_a(n) <= t_b(k) < t_a(n+1)`` and ``z_b(k) = z_a(n)``."""
    if not isinstance(sched, Schedule):
        raise InvalidParameter("sched must be a Schedule")
    zs = (_values(z0), _values(z1))
    for a in (0, 1):
        _check_cover(zs[a], sched[a], f"t{a}")
    for a, b in ((0, 1), (1, 0)):
        ta = np.asarray(sched[a])
        tb = np.asarray(sched[b])
        # state of walk a when walk b enters state k
        n = np.searchsorted(ta, tb, side="right") - 1
        ok = n >= 0
        za = zs[a][: len(ta)]
        zb = zs[b][: len(tb)]
        if np.any(za[n[ok]] == zb[ok]):
            return False
    return True


def verify_no_collision_literal(z0, z1, sched: Schedule) -> bool:
    """Direct transcription of the triple condition; quadratic, used in tests."""
    zs = (_values(z0), _values(z1))
    inf = float("inf")
    for a, b in ((0, 1), (1, 0)):
        ta, tb = sched[a], sched[b]
        for n in range(len(ta)):
            nxt = ta[n + 1] if n + 1 < len(ta) else inf
            for k in range(len(tb)):
                if ta[n] <= tb[k] < nxt and zs[b][k] == zs[a][n]:
                    return False
    return True


def verify_binary_schedule(z0, z1, sched: Schedule) -> bool:
    """No 1 of either sequence lacks a 0 of the other at the same time."""
    if not isinstance(sched, Schedule):
        raise InvalidParameter("sched must be a Schedule")
    zs = (_values(z0), _values(z1))
    for a in (0, 1):
        _check_cover(zs[a], sched[a], f"t{a}")
    for a, b in ((0, 1), (1, 0)):
        zero_times = {t for t, v in zip(sched[b], zs[b]) if v == 0}
        for t, v in zip(sched[a], zs[a]):
            if v == 1 and t not in zero_times:
                return False
    return True


def extract_schedule(x_seq, y_seq, n: int) -> Schedule | None:
    """Schedule along a witness path escaping ``[0, n]^2``, or None if blocked."""
    xv, yv = _values(x_seq), _values(y_seq)
    if len(xv) and len(yv) and xv[0] == yv[0]:
        raise InvalidParameter("equal initial colors collide at time 0")
    rs = reach_set(xv, yv, n)
    target = rs.escape_target()
    if target is None:
        return None
    return path_to_schedule(rs.path_to(*target))


def extract_binary_schedule(z0, z1, n: int) -> Schedule | None:
    """Schedule for an alignment of the first ``n`` symbols of each sequence.

    Every alignment move is one time step: a joint move puts both symbols at
    the same time, a skip puts a lone 0 at a time of its own. Since both
    schedules start at time 0, the first move must be joint; None is returned
    when no such alignment exists.
    """
    a, b = _values(z0), _values(z1)
    if n < 1:
        raise InvalidParameter("horizon must be at least 1")
    rows = binary_reach_rows(a, b, n, emit_first=True)
    if not (rows[n] >> n) & 1:
        return None

    def reached(i, j):
        # the origin only leads to (1, 1), which ends the backtrack
        return i >= 0 and j >= 0 and (i, j) != (0, 0) and bool((rows[j] >> i) & 1)

    moves = []
    i, j = n, n
    while (i, j) != (1, 1):
        if reached(i - 1, j - 1) and not (a[i - 1] == 1 and b[j - 1] == 1):
            moves.append("D")
            i, j = i - 1, j - 1
        elif reached(i - 1, j) and a[i - 1] == 0:
            moves.append("R")
            i -= 1
        elif reached(i, j - 1) and b[j - 1] == 0:
            moves.append("U")
            j -= 1
        else:  # pragma: no cover - the DP guarantees a predecessor
            raise RuntimeError("alignment backtrack failed")
    moves.append("D")
    moves.reverse()
    t0, t1 = [], []
    for time, mv in enumerate(moves):
        if mv in "DR":
            t0.append(time)
        if mv in "DU":
            t1.append(time)
    return Schedule(tuple(t0), tuple(t1))


def format_schedule(sched: Schedule) -> str:
    return " ".join(map(str, sched.t0)) + "\n" + " ".join(map(str, sched.t1)) + "\n"


def parse_schedule(text: str) -> Schedule:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2:
        raise InvalidParameter("schedule text must have exactly two lines")
    try:
        t0, t1 = (tuple(int(v) for v in ln.split()) for ln in lines)
    except ValueError as exc:
        raise InvalidParameter(f"bad schedule entry: {exc}") from None
    return Schedule(t0, t1)


def write_schedule(sched: Schedule, path) -> None:
    FsPath(path).write_text(format_schedule(sched))


def read_schedule(path) -> Schedule:
    return parse_schedule(FsPath(path).read_text())
