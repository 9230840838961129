"""Line-oriented text dump of a mazery, its parser and a consistency check.

Layout, one record per line, fields separated by single spaces::

    demon-lab-mazery 1
    level 2
    window 23 1177
    m 3
    loops 0
    params k=2 R=49.0 ...
    meta key=value ...
    note free text
    summary horizontal count=... min_rank=... max_rank=... max_size=... rank_window_ok=1
    wall vertical 0 29 70.0 emerging-1
    barrier horizontal 4 31 49.0 emerging-2
    trap 10 12 40 43 uncorrelated

Objects are sorted by (direction, start, end, rank, kind); floats use
``repr`` so a dump parses back to the same values.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..exceptions import InvalidParameter
from ..params import LevelParams
from .detect import CompoundSummary
from .objects import Direction, Interval, Trap, TrapKind, WallValue

__all__ = ["MazeryDump", "dump_mazery", "format_dump", "parse_dump", "read_dump",
           "write_dump", "verify_dump"]

MAGIC = "demon-lab-mazery 1"
_DIRS = {"vertical": Direction.VERTICAL, "horizontal": Direction.HORIZONTAL}


@dataclass
class MazeryDump:
    level: int
    window: tuple[int, int]
    m: int
    loops: bool
    params: LevelParams
    meta: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    summaries: dict = field(default_factory=dict)
    walls: dict = field(default_factory=dict)
    barriers: dict = field(default_factory=dict)
    traps: list | None = None


def _num(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _param(name: str, v):
    if name == "k":
        return int(v)
    return bool(v) if name == "toy" else float(v)


def _kv(pairs: dict) -> str:
    return " ".join(f"{k}={_num(v)}" for k, v in pairs.items())


def _wall_line(tag: str, w: WallValue) -> str:
    return f"{tag} {w.direction.name.lower()} {w.start} {w.end} {_num(float(w.rank))} {w.kind}"


def dump_mazery(M, meta: dict | None = None, traps: bool = False) -> MazeryDump:
    """Snapshot of ``M``; ``traps=True`` also lists every trap of the core window."""
    out = MazeryDump(level=M.level, window=tuple(M.window), m=M.m, loops=M.loops,
                     params=M.params, meta=dict(meta or {}), notes=list(M.notes),
                     summaries=dict(M.lazy_barriers))
    for d in Direction:
        out.walls[d] = list(M.walls[d])
        out.barriers[d] = [w for w in M.barriers[d] if not w.is_wall]
    if traps:
        out.traps = sorted(M.all_traps(), key=lambda t: (t.x0, t.x1, t.y0, t.y1, t.kind.value))
    return out


def format_dump(dump: MazeryDump) -> str:
    lines = [MAGIC, f"level {dump.level}", f"window {dump.window[0]} {dump.window[1]}",
             f"m {dump.m}", f"loops {int(dump.loops)}",
             "params " + _kv({f.name: _param(f.name, getattr(dump.params, f.name))
                              for f in dataclasses.fields(LevelParams)})]
    if dump.meta:
        lines.append("meta " + _kv(dump.meta))
    lines += [f"note {' '.join(str(n).split())}" for n in dump.notes]
    for d in Direction:
        s = dump.summaries.get(d)
        if s is not None:
            lines.append(f"summary {d.name.lower()} " + _kv({
                "count": s.count, "min_rank": float(s.min_rank), "max_rank": float(s.max_rank),
                "max_size": s.max_size, "rank_window_ok": bool(s.rank_window_ok)}))
    objs = []
    for d in Direction:
        objs += [("wall", w) for w in dump.walls.get(d, [])]
        objs += [("barrier", w) for w in dump.barriers.get(d, [])]
    objs.sort(key=lambda p: (p[1].direction, p[1].start, p[1].end, p[1].rank, p[1].kind, p[0]))
    lines += [_wall_line(tag, w) for tag, w in objs]
    if dump.traps is not None:
        lines.append(f"traps {len(dump.traps)}")
        lines += [f"trap {t.x0} {t.x1} {t.y0} {t.y1} {t.kind.value}" for t in dump.traps]
    return "\n".join(lines) + "\n"


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _parse_kv(fields: list[str], lineno: int) -> dict:
    out = {}
    for item in fields:
        if "=" not in item:
            raise InvalidParameter(f"dump line {lineno}: expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k] = _parse_value(v)
    return out


def parse_dump(text: str) -> MazeryDump:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise InvalidParameter("not a mazery dump (missing header)")
    head: dict = {"meta": {}, "notes": [], "summaries": {}}
    walls = {d: [] for d in Direction}
    barriers = {d: [] for d in Direction}
    traps = None
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        tag, _, rest = raw.partition(" ")
        parts = rest.split()
        try:
            if tag == "level":
                head["level"] = int(parts[0])
            elif tag == "window":
                head["window"] = (int(parts[0]), int(parts[1]))
            elif tag == "m":
                head["m"] = int(parts[0])
            elif tag == "loops":
                head["loops"] = bool(int(parts[0]))
            elif tag == "params":
                kv = _parse_kv(parts, lineno)
                kv["k"], kv["toy"] = int(kv["k"]), bool(kv["toy"])
                for key in kv:
                    if key not in ("k", "toy"):
                        kv[key] = float(kv[key])
                head["params"] = LevelParams(**kv)
            elif tag == "meta":
                head["meta"] = _parse_kv(parts, lineno)
            elif tag == "note":
                head["notes"].append(rest)
            elif tag == "summary":
                d = _DIRS[parts[0]]
                kv = _parse_kv(parts[1:], lineno)
                head["summaries"][d] = CompoundSummary(
                    d, int(kv["count"]), float(kv["min_rank"]), float(kv["max_rank"]),
                    int(kv["max_size"]), bool(kv["rank_window_ok"]))
            elif tag in ("wall", "barrier"):
                d = _DIRS[parts[0]]
                w = WallValue(Interval(int(parts[1]), int(parts[2])), float(parts[3]), d,
                              tag, parts[4])
                (walls if tag == "wall" else barriers)[d].append(w)
            elif tag == "traps":
                traps = []
            elif tag == "trap":
                if traps is None:
                    traps = []
                traps.append(Trap(int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3]),
                                  TrapKind(parts[4])))
            else:
                raise InvalidParameter(f"dump line {lineno}: unknown record {tag!r}")
        except (IndexError, KeyError, ValueError, TypeError) as exc:
            raise InvalidParameter(f"dump line {lineno}: malformed {tag!r} record ({exc})") from None
    for key in ("level", "window", "m", "loops", "params"):
        if key not in head:
            raise InvalidParameter(f"dump is missing the {key!r} record")
    return MazeryDump(level=head["level"], window=head["window"], m=head["m"],
                      loops=head["loops"], params=head["params"], meta=head["meta"],
                      notes=head["notes"], summaries=head["summaries"], walls=walls,
                      barriers=barriers, traps=traps)


def write_dump(dump: MazeryDump, path) -> None:
    Path(path).write_text(format_dump(dump))


def read_dump(path) -> MazeryDump:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidParameter(f"cannot read dump {path}: {exc}") from None
    return parse_dump(text)


def verify_dump(dump: MazeryDump) -> list[str]:
    """Invariant violations visible in the dump itself (empty when consistent)."""
    p = dump.params
    bad = []
    lo, hi = dump.window
    if not 0 <= lo <= hi:
        bad.append(f"window {lo} {hi} is not an interval")
    upper = p.tau_bar * p.R
    for d in Direction:
        for w in dump.walls.get(d, []) + dump.barriers.get(d, []):
            where = f"{w.status} {d.name.lower()} ({w.start}, {w.end}]"
            if w.size > p.Delta + 1e-9:
                bad.append(f"{where}: size {w.size} exceeds Delta {p.Delta:g}")
            if w.rank < p.R - 1e-9 or w.rank > upper + 1e-9:
                bad.append(f"{where}: rank {w.rank:g} outside [{p.R:g}, {upper:g}]")
        walls = sorted(dump.walls.get(d, []), key=lambda w: (w.start, w.end))
        for a, b in zip(walls, walls[1:]):
            if a.kind.startswith("emerging") and b.kind.startswith("emerging") \
                    and a.body.intersects(b.body):
                bad.append(f"emerging walls ({a.start}, {a.end}] and ({b.start}, {b.end}] overlap")
        s = dump.summaries.get(d)
        if s is not None:
            if s.max_size > p.Delta + 1e-9:
                bad.append(f"{d.name.lower()} summary: size {s.max_size} exceeds Delta")
            if not s.rank_window_ok:
                bad.append(f"{d.name.lower()} summary: compound rank outside its window")
    for t in dump.traps or []:
        if t.size > p.Delta + 1e-9:
            bad.append(f"trap {t.x0} {t.x1} {t.y0} {t.y1}: size {t.size} exceeds Delta")
    if not all(math.isfinite(v) for v in (p.R, p.Delta)):
        bad.append("non-finite R or Delta")
    return bad
