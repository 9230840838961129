"""Machine checks of the combinatorial conditions and structural invariants.

Every check is confined to the core window; objects or intervals reaching
past it are boundary-indeterminate and skipped. A check that cannot be
decided at all (for instance because the level's traps were not fully
computed) reports ``INDETERMINATE`` instead of passing silently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..percolation import LatticePoint, RectKind, RectSpec, reachable_in_rect
from .cleanness import Rect
from .detect import compound_index, is_hop
from .objects import Direction, TrapKind, WallValue

__all__ = ["ConditionResult", "ConditionReport", "check_conditions", "external_intervals",
           "spanned_by_neighbors", "minslope"]

PASS, FAIL, INDETERMINATE = "PASS", "FAIL", "INDETERMINATE"


@dataclass
class ConditionResult:
    name: str
    status: str = PASS
    checked: int = 0
    counterexamples: list = field(default_factory=list)
    detail: str = ""

    def fail(self, example, limit: int = 10):
        self.status = FAIL
        if len(self.counterexamples) < limit:
            self.counterexamples.append(example)


@dataclass
class ConditionReport:
    level: int
    results: list[ConditionResult]

    @property
    def passed(self) -> bool:
        return all(r.status != FAIL for r in self.results)

    def by_name(self, name: str) -> ConditionResult:
        return next(r for r in self.results if r.name == name)

    def failures(self) -> list[ConditionResult]:
        return [r for r in self.results if r.status == FAIL]

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            line = f"{r.status} {r.name} checked={r.checked}"
            if r.detail:
                line += f" ({r.detail})"
            if r.counterexamples:
                line += " counterexamples=" + "; ".join(map(str, r.counterexamples))
            out.append(line)
        return out


def minslope(u, v) -> float:
    dx, dy = v[0] - u[0], v[1] - u[1]
    if dx <= 0 or dy <= 0:
        return 0.0
    return min(dy / dx, dx / dy)


def _union(walls: list[WallValue]) -> list[tuple[int, int]]:
    comps = []
    for w in sorted(walls, key=lambda v: (v.start, v.end)):
        if comps and w.start < comps[-1][1]:
            comps[-1][1] = max(comps[-1][1], w.end)
        else:
            comps.append([w.start, w.end])
    return [tuple(c) for c in comps]


def external_intervals(M, d: Direction) -> list[tuple[int, int]]:
    """Maximal intervals meeting no wall, inside the core window.

    Intervals touching the core boundary are dropped, except one starting
    at ``-1`` when the core starts at 0.
    """
    lo, hi = M.window
    comps = _union(M.walls[d])
    out = []
    prev = -1
    for s, e in comps:
        if s > prev and (prev >= lo or prev == -1 and lo == 0) and s < hi:
            out.append((prev, s))
        prev = max(prev, e)
    return out


def spanned_by_neighbors(M, d: Direction, a: int, b: int) -> bool:
    """``(a, b]`` is the union of disjoint walls separated by hops, first at ``a``."""
    walls = [w for w in M.walls[d] if a <= w.start and w.end <= b]
    by_start = {}
    for w in walls:
        by_start.setdefault(w.start, []).append(w)
    frontier = {w.end for w in by_start.get(a, [])}
    seen = set()
    while frontier:
        p = frontier.pop()
        if p == b:
            return True
        if p in seen:
            continue
        seen.add(p)
        for w in walls:
            if w.start >= p and w.end not in seen and is_hop(M, d, p, w.start):
                frontier.add(w.end)
    return False


def _invariants(M, rng) -> list[ConditionResult]:
    p = M.params
    tau_bar = p.tau_bar
    lo, hi = M.window
    res_sub = ConditionResult("walls-are-barriers")
    res_size = ConditionResult("object-sizes")
    res_rank = ConditionResult("rank-window")
    res_disj = ConditionResult("emerging-walls-disjoint")
    res_comp = ConditionResult("compound-rank-window")
    res_unc = ConditionResult("uncorrelated-size")
    res_light = ConditionResult("no-light-wall-survives")
    res_heavy = ConditionResult("heavy-walls-inherited")
    new_level = M.lower is not None
    for d in Direction:
        bkeys = {(w.start, w.end, w.rank, w.kind) for w in M.barriers[d]}
        for w in M.walls[d]:
            res_sub.checked += 1
            if (w.start, w.end, w.rank, w.kind) not in bkeys:
                res_sub.fail((d.name, w.start, w.end, w.kind))
        for w in M.barriers[d]:
            res_size.checked += 1
            if w.size > p.Delta + 1e-9:
                res_size.fail((d.name, w.start, w.end, w.size))
            if new_level:
                res_rank.checked += 1
                if not (p.R - 1e-9 <= w.rank <= tau_bar * p.R + 1e-9):
                    res_rank.fail((d.name, w.start, w.end, w.rank))
        summary = M.lazy_barriers.get(d)
        if summary is not None:
            res_size.checked += summary.count
            if summary.max_size > p.Delta + 1e-9:
                res_size.fail((d.name, "compound summary", summary.max_size))
            res_rank.checked += summary.count
            if summary.min_rank < p.R - 1e-9 or summary.max_rank > tau_bar * p.R + 1e-9:
                res_rank.fail((d.name, "compound summary", summary.min_rank, summary.max_rank))
            res_comp.checked += summary.count
            if not summary.rank_window_ok:
                res_comp.fail((d.name, "compound summary"))
        emerging = sorted((w for w in M.walls[d] if w.kind.startswith("emerging")),
                          key=lambda v: (v.start, v.end))
        for w1, w2 in zip(emerging, emerging[1:]):
            res_disj.checked += 1
            if w2.start < w1.end:
                res_disj.fail((d.name, (w1.start, w1.end), (w2.start, w2.end)))
        if new_level:
            L = M.lower
            lp = L.params
            i_cap = math.log(lp.f) / math.log(lp.lam) if lp.f > 1 else 0.0
            for w in M.barriers[d]:
                if not w.kind.startswith("compound"):
                    continue
                r1, r2, i = w.kind[len("compound<"):-1].split(",")
                r1, r2, i = float(r1), float(r2), int(i)
                res_comp.checked += 1
                if not (r1 + r2 - i_cap - 1e-9 <= w.rank <= r1 + r2 + 1e-9) or \
                        not math.isclose(w.rank, r1 + r2 - i):
                    res_comp.fail((d.name, w.start, w.end, w.rank))
            mine = {(w.start, w.end, w.rank) for w in M.walls[d]}
            erased = {(v.start, v.end, v.rank) for e in M.erasures for v in e.removed}
            for w in L.walls[d]:
                key = (w.start, w.end, w.rank)
                if L.light(w):
                    res_light.checked += 1
                    if key in mine:
                        res_light.fail((d.name, w.start, w.end, w.rank))
                else:
                    res_heavy.checked += 1
                    if key not in mine and key not in erased:
                        res_heavy.fail((d.name, w.start, w.end, w.rank))
    for e in M.erasures:
        res_heavy.checked += 1
        if not (M.lower.light(e.wall) and all(e.wall.body.contains(v.body) for v in e.removed)):
            res_heavy.fail(("erasure", e.wall.start, e.wall.end))
    # traps on a few sampled squares
    # traps of pairs of pairs are dense in toy ladders; keep the squares small
    side = min(64 if M.level <= 2 else 12, hi - lo)
    if side > 0:
        for _ in range(3):
            x0 = int(rng.integers(lo, hi - side + 1))
            y0 = int(rng.integers(lo, hi - side + 1))
            for t in M.traps.traps_in(x0, x0 + side - 1, y0, y0 + side - 1):
                res_size.checked += 1
                if t.size > p.Delta + 1e-9:
                    res_size.fail(("trap", t.x0, t.y0, t.size))
                if t.kind is TrapKind.UNCORRELATED and new_level:
                    res_unc.checked += 1
                    if t.size > M.lower.params.Delta + M.lower.params.f + 1e-9:
                        res_unc.fail((t.x0, t.x1, t.y0, t.y1))
    return [res_sub, res_size, res_rank, res_disj, res_comp, res_unc, res_light, res_heavy]


def _check_a(M) -> ConditionResult:
    res = ConditionResult("4.2a-external-inner-clean")
    D = M.params.Delta
    for d in Direction:
        for a, b in external_intervals(M, d):
            if b - a >= D or a == -1:
                res.checked += 1
                if not M.cleanness.inner_clean(d, a, b):
                    res.fail((d.name, a, b))
    return res


def _check_b(M) -> ConditionResult:
    res = ConditionResult("4.2b-spanned-by-neighbor-walls")
    D = M.params.Delta
    for d in Direction:
        ext = [(a, b) for a, b in external_intervals(M, d) if b - a >= D or a == -1]
        for (a1, b1), (a2, b2) in zip(ext, ext[1:]):
            res.checked += 1
            if not spanned_by_neighbors(M, d, b1, a2):
                res.fail((d.name, b1, a2))
    return res


def _clean_points(M, d) -> np.ndarray:
    lo, hi = M.window
    return np.array([M.cleanness.clean_point(d, x) for x in range(lo, hi)], dtype=bool)


def _check_c(M, clean) -> ConditionResult:
    res = ConditionResult("4.2c-clean-point-in-middle-third")
    D = int(math.ceil(M.params.Delta))
    lo, hi = M.window
    n = hi - lo
    for d in Direction:
        starts = np.arange(lo - 1, hi - 3 * D)  # windows (a, a + 3D] inside the core
        if len(starts) == 0:
            continue
        has_wall = np.zeros(len(starts), dtype=bool)
        for w in M.walls[d]:
            k0 = max(w.end - 3 * D, lo - 1) - (lo - 1)
            k1 = min(w.start, hi - 3 * D - 1) - (lo - 1)
            if k0 <= k1:
                has_wall[k0:k1 + 1] = True
        cs = np.concatenate([[0], np.cumsum(clean[d], dtype=np.int64)])
        for k in np.flatnonzero(~has_wall):
            a = int(starts[k])
            m0, m1 = a + D + 1 - lo, min(a + 2 * D, hi - 1) - lo
            res.checked += 1
            if m1 < m0 or cs[m1 + 1] - cs[m0] == 0:
                res.fail((d.name, a, a + 3 * D))
    del n
    return res


def _traps_complete(M) -> bool:
    return getattr(M.traps, "complete", True)


def _has_trap(M, q: Rect) -> bool:
    x0 = q.x0 + (q.kind == "left-open")
    y0 = q.y0 + (q.kind == "bottom-open")
    if x0 > q.x1 or y0 > q.y1:
        return False
    return M.traps.has_trap_in(x0, q.x1, y0, q.y1)


def _contains_wall(M, d: Direction, a: int, b: int) -> bool:
    """Some wall body lies inside the integer range ``[a, b]``."""
    return any(w.start >= a - 1 and w.end <= b for w in M.walls[d])


def _check_d(M, rng, samples: int) -> ConditionResult:
    res = ConditionResult("4.2d-clean-points-2d")
    if not _traps_complete(M):
        res.status = INDETERMINATE
        res.detail = "traps of this level are not fully computed"
        return res
    D = int(math.ceil(M.params.Delta))
    lo, hi = M.window
    side = 3 * D
    if hi - lo < side + 1:
        res.detail = "core window smaller than 3 Delta"
        return res
    C = M.cleanness
    for _ in range(samples):
        x0 = int(rng.integers(lo, hi - side))
        y0 = int(rng.integers(lo, hi - side))
        q = Rect(x0, x0 + side, y0, y0 + side)
        if _contains_wall(M, Direction.HORIZONTAL, y0, y0 + side) or _has_trap(M, q):
            continue
        mids_x = range(x0 + D + 1, x0 + 2 * D + 1)
        mids_y = range(y0 + D + 1, y0 + 2 * D + 1)
        for a in mids_x:
            if not C.right_clean(Direction.VERTICAL, a):
                continue
            res.checked += 1
            if not any(C.upper_right_clean(a, b) for b in mids_y):
                res.fail(("upper-right", a, y0))
            break
    return res


def _check_reach(M, rng, samples: int) -> ConditionResult:
    res = ConditionResult("reachability-on-hops")
    sigma = M.params.sigma
    if not 0 <= sigma < 0.5:
        res.fail(("sigma", sigma))
        return res
    if not _traps_complete(M):
        res.status = INDETERMINATE
        res.detail = "traps of this level are not fully computed"
        return res
    lo, hi = M.window
    D = int(math.ceil(M.params.Delta))
    cap = max(4, 3 * D)
    C = M.cleanness
    tries = 0
    while res.checked < samples and tries < 20 * samples:
        tries += 1
        smax = min(cap, hi - lo - 1)
        if smax < 1:
            break
        # log-uniform sides: short hops are the common case
        w = int(np.exp(rng.uniform(0, np.log(smax + 1))))
        h = int(np.exp(rng.uniform(0, np.log(smax + 1)))) - (sigma == 0 and rng.random() < 0.2)
        w, h = min(w, smax), max(min(h, smax), 0)
        if rng.random() < 0.5:
            w, h = h, w
        if w == h == 0 or minslope((0, 0), (w, h)) < sigma and sigma > 0:
            continue
        x0 = int(rng.integers(lo, hi - w))
        y0 = int(rng.integers(lo, hi - h))
        kind = ("closed", "left-open", "bottom-open")[int(rng.integers(0, 3))]
        if (kind == "left-open" and w == 0) or (kind == "bottom-open" and h == 0):
            continue
        q = Rect(x0, x0 + w, y0, y0 + h, kind)
        xa = x0 + 1 if kind == "left-open" else x0
        ya = y0 + 1 if kind == "bottom-open" else y0
        if _contains_wall(M, Direction.VERTICAL, xa, x0 + w) or \
                _contains_wall(M, Direction.HORIZONTAL, ya, y0 + h):
            continue
        if _has_trap(M, q):
            continue
        if not (C.inner_clean(Direction.VERTICAL, x0, x0 + w) if w else True):
            continue
        if not (C.inner_clean(Direction.HORIZONTAL, y0, y0 + h) if h else True):
            continue
        if not (C.trap_clean("start", q) and C.trap_clean("end", q)):
            continue
        res.checked += 1
        spec = RectSpec(LatticePoint(x0, y0), LatticePoint(x0 + w, y0 + h), RectKind(kind))
        if not reachable_in_rect(M.x, M.y, spec, confined=True):
            res.fail((kind, x0, y0, x0 + w, y0 + h))
    res.detail = f"{tries} rectangles sampled"
    return res


def check_conditions(M, samples: int = 200, seed: int = 0) -> ConditionReport:
    """Pass/fail per condition with counterexample coordinates."""
    rng = np.random.default_rng([seed, M.level])
    results = _invariants(M, rng)
    results.append(_check_a(M))
    results.append(_check_b(M))
    clean = {d: _clean_points(M, d) for d in Direction}
    results.append(_check_c(M, clean))
    results.append(_check_d(M, rng, max(1, samples // 10)))
    results.append(_check_reach(M, rng, samples))
    return ConditionReport(M.level, results)
