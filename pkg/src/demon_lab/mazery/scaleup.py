"""The scale-up ``M -> M*`` and a ladder of toy parameters."""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass

from ..exceptions import InvalidParameter
from ..params import LevelParams, toy_level_params
from ..rng import RngStream
from ..walks import gen_walk
from .cleanness import boxes_near, scale_cleanness
from .detect import (TrapContext, derive_compound, derive_emerging, detect_correlated,
                     detect_missing_hole, detect_uncorrelated, is_dominant, pad_width,
                     uncorrelated_boxes)
from .estimator import Estimator
from .objects import Direction, Trap, WallValue
from .structure import Mazery, base_mazery

__all__ = ["ScaledTraps", "Erasure", "scale_up", "toy_ladder", "check_next_params",
           "build_tower"]


class ScaledTraps:
    """Traps of ``M*``, computed per queried region from ``M``."""

    substitutable = False

    def __init__(self, M, estimator: Estimator, ctx: TrapContext, memo_size: int = 4096):
        self.M = M
        self.estimator = estimator
        self.ctx = ctx
        self._memo: OrderedDict = OrderedDict()
        self._memo_size = memo_size

    @property
    def complete(self) -> bool:
        return self.ctx.substitutable

    def traps_in(self, x0: int, x1: int, y0: int, y1: int) -> list[Trap]:
        key = (x0, x1, y0, y1)
        hit = self._memo.get(key)
        if hit is not None:
            self._memo.move_to_end(key)
            return hit
        found = set(detect_uncorrelated(self.M, key))
        found.update(self._other(key))
        out = sorted(found, key=lambda t: (t.x0, t.x1, t.y0, t.y1, t.kind.value))
        self._memo[key] = out
        if len(self._memo) > self._memo_size:
            self._memo.popitem(last=False)
        return out

    def _other(self, region) -> list[Trap]:
        found = detect_correlated(self.M, self.estimator, region, self.ctx)
        found += detect_missing_hole(self.M, self.estimator, region, self.ctx)
        return found

    def has_trap_in(self, x0, x1, y0, y1) -> bool:
        region = (x0, x1, y0, y1)
        boxes = uncorrelated_boxes(self.M, region, first_only=True)
        if boxes is None:
            return bool(self.traps_in(*region))
        return bool(len(boxes)) or bool(self._other(region))

    def near_trap(self, q, box, ux, uy, g) -> bool:
        boxes = uncorrelated_boxes(self.M, box)
        if boxes is None:
            return any(q.contains_trap(t) and t.distance_to(ux, uy) < g
                       for t in self.traps_in(*box))
        if boxes_near(boxes, q, ux, uy, g):
            return True
        return any(q.contains_trap(t) and t.distance_to(ux, uy) < g for t in self._other(box))


@dataclass(frozen=True)
class Erasure:
    """A dominant light wall whose removal took the walls inside it along."""

    wall: WallValue
    removed: tuple[WallValue, ...]


def check_next_params(M, params_next: LevelParams) -> None:
    p = M.params
    if not math.isclose(params_next.R, p.R_star, rel_tol=1e-9):
        raise InvalidParameter(f"next rank {params_next.R} differs from tau R = {p.R_star}")
    if 3 * p.f > params_next.Delta + 1e-9:
        raise InvalidParameter("next Delta must be at least 3 f")
    if params_next.Delta + 1e-9 < p.f + p.Delta:
        raise InvalidParameter("next Delta must cover uncorrelated traps")


def scale_up(M: Mazery, estimator: Estimator, params_next: LevelParams) -> Mazery:
    """Build ``M*``: new traps, emerging and compound walls, inherited heavy walls."""
    check_next_params(M, params_next)
    ctx = TrapContext(M, estimator)
    emerging = derive_emerging(M, estimator, ctx)
    c_barriers, c_walls, summaries = derive_compound(M, emerging)
    heavy_w = {d: [w for w in M.walls[d] if not M.light(w)] for d in Direction}
    heavy_b = {d: [w for w in M.barriers[d] if not M.light(w)] for d in Direction}
    erasures = []
    for d in Direction:
        for w in M.walls[d]:
            if M.light(w) and is_dominant(M, w):
                inside = tuple(v for v in heavy_w[d] if v is not w and w.body.contains(v.body))
                if inside:
                    erasures.append(Erasure(w, inside))
                    gone = {v.key() for v in inside}
                    heavy_w[d] = [v for v in heavy_w[d] if v.key() not in gone]
    walls, barriers = {}, {}
    for d in Direction:
        inherited = [WallValue(w.body, w.rank, d, "wall", "inherited") for w in heavy_w[d]]
        walls[d] = _dedupe(emerging[1][d] + c_walls[d] + inherited)
        wall_keys = {_geo(w) for w in walls[d]}
        kept = [WallValue(w.body, w.rank, d, "barrier", "inherited") for w in heavy_b[d]]
        pool = emerging[0][d] + c_barriers[d] + kept
        pool = [w.as_wall() if _geo(w) in wall_keys else w.as_barrier() for w in pool]
        barriers[d] = _dedupe(pool + walls[d])
    pad = pad_width(M.params)
    lo, hi = M.window
    window = (min(lo + pad, hi), max(min(lo + pad, hi), hi - pad))
    notes = ctx.notes
    for d, s in summaries.items():
        notes.append(f"{s.count} {d.name.lower()} compound barriers kept as a summary")
    out = Mazery(level=M.level + 1, params=params_next, x=M.x, y=M.y, window=window, m=M.m,
                 traps=ScaledTraps(M, estimator, ctx), barriers=barriers, walls=walls,
                 cleanness=scale_cleanness(M), loops=M.loops, lower=M, notes=notes,
                 erasures=erasures)
    out.lazy_barriers = summaries
    return out


def _geo(w: WallValue):
    return (w.start, w.end, w.rank, w.kind)


def _dedupe(ws):
    seen = {}
    for w in ws:
        k = _geo(w)
        if k not in seen or (w.is_wall and not seen[k].is_wall):
            seen[k] = w
    return sorted(seen.values(), key=lambda w: (w.start, w.end, w.rank, w.kind))


def toy_ladder(m: int, w1: float | None = None, R0: float = 16.0, levels: int = 3,
               tau: float = 1.75, lam: float = math.sqrt(2.0)) -> list[LevelParams]:
    """Small parameters for levels ``1..levels``.

    Level 1 has ``Delta = 1, f = 4, g = 2``; each next ``Delta`` is the
    previous ``Delta*``, with ``f = g = Delta`` from level 2 on.
    """
    if w1 is None:
        w1 = min(0.99, 1.5 / (m - 1))
    sizes = [(1, 4, 2, 32), (32, 32, 32, 544), (544, 544, 544, 1632)]
    sigmas = [0.0, 0.45, 0.49]
    out = []
    R, w, q = R0 * tau, w1, 0.05
    for k in range(levels):
        D, f, g, Ds = sizes[k]
        out.append(toy_level_params(Delta=D, f=f, g=g, w=w, q=q, R=R, sigma=sigmas[k], k=k + 1,
                                    Delta_star=Ds))
        q = q + Ds * lam ** (-R)
        R, w = R * tau, w ** tau
    return out


def build_tower(m: int, window: int, seed: int, levels: int = 2, loops: bool = False,
                estimator: Estimator | None = None, R0: float = 16.0) -> list[Mazery]:
    """Mazeries ``M1..M_levels`` on the walk pair of stream ``(seed, 0)``.

    ``X`` is drawn first, then ``Y``, from the same stream, as for trial 0 of
    a blocking curve.
    """
    if not 1 <= levels <= 3:
        raise InvalidParameter("the toy ladder has levels 1..3")
    stream = RngStream(seed, 0)
    x = gen_walk(m, window, loops, stream).values
    y = gen_walk(m, window, loops, stream).values
    ladder = toy_ladder(m, R0=R0, levels=levels)
    estimator = estimator or Estimator(master_seed=seed)
    tower = [base_mazery(x, y, window, ladder[0].w, m=m, loops=loops, params=ladder[0])]
    for params in ladder[1:]:
        tower.append(scale_up(tower[-1], estimator, params))
    return tower
