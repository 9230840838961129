"""Detectors of the next level's objects: traps, emerging and compound barriers.

Geometry conventions:

* an interval ``I`` of a correlated trap is the closed ``[u, u + span]`` with
  ``span = ceil(4 lambda_j)``; its right-closed sub-windows of size
  ``ell = max(1, floor(lambda_j))`` are the integer runs ``p .. p + ell - 1``
  with ``u <= p <= u + span - ell + 1``;
* "horizontal" objects have ``I`` on the x-axis and ``J`` on the y-axis, so
  their probabilities are over ``Y``; "vertical" ones swap the axes;
* emerging barriers of direction ``d`` live on the sequence of that axis and
  their probabilities are over the other sequence.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from ..params import jump_table
from .estimator import Estimator, colorset_distribution, sample_continuations
from .holes import iter_holes
from .objects import Direction, Interval, Trap, TrapKind, WallValue

__all__ = [
    "window_sizes",
    "coverage_ok",
    "PhiTable",
    "detect_uncorrelated",
    "uncorrelated_boxes",
    "point_pair_boxes",
    "detect_correlated",
    "detect_missing_hole",
    "missing_hole_event_holds",
    "is_external",
    "is_hop",
    "is_dominant",
    "prewall_ok",
    "designate_walls",
    "derive_emerging",
    "CompoundSummary",
    "derive_compound",
    "compound_index",
    "pad_width",
]

KIND_BY_TYPE = {1: TrapKind.CORRELATED_1, 2: TrapKind.CORRELATED_2}


def window_sizes(params, j: int) -> tuple[int, int]:
    """``(ell, span)`` of correlated-trap type ``j`` at these parameters."""
    lam = params.lambda1 if j == 1 else params.lambda2
    return max(1, math.floor(lam + 1e-9)), math.ceil(4 * lam - 1e-9)


def pad_width(params) -> int:
    """Padding of the core window on each side."""
    return math.ceil(max(4 * params.g_prime + 4 * params.Delta, params.f) + params.Delta)


def coverage_ok(hits: np.ndarray, ell: int, span: int) -> np.ndarray:
    """``ok[u]``: every ``ell``-run starting in ``[u, u + span - ell + 1]`` has a hit.

    Defined for ``0 <= u <= len(hits) - span - 1``.
    """
    n = len(hits)
    if n <= span:
        return np.zeros(0, dtype=bool)
    cs = np.concatenate([[0], np.cumsum(hits, dtype=np.int64)])
    runs = cs[ell:] - cs[:-ell]  # runs[p] = hits in p .. p+ell-1
    bad = np.concatenate([[0], np.cumsum(runs == 0, dtype=np.int64)])
    u = np.arange(n - span)
    last = u + span - ell + 1
    return (bad[last + 1] - bad[u]) == 0


class _MaskCoverage(dict):
    """``self[S]``: coverage array for color set ``S``, computed on first use.

    Only sets that actually occur are evaluated, so large ``m`` stays cheap.
    """

    def __init__(self, seq: np.ndarray, ell: int, span: int):
        super().__init__()
        self.seq, self.ell, self.span = seq, ell, span

    def __missing__(self, S: int) -> np.ndarray:
        arr = coverage_ok(((S >> self.seq) & 1).astype(bool), self.ell, self.span)
        self[S] = arr
        return arr


@dataclass
class PhiTable:
    """Conditional probabilities of the covering event along one axis, level 1.

    ``cond[u]`` is the supremum over ``s`` of the probability that
    ``[u, u + span]`` is covered given ``Y(b-1) = s``; ``initial[u]`` is the
    same with the window starting the other walk.
    """

    axis: Direction
    j: int
    ell: int
    span: int
    rows: int
    cond: np.ndarray
    initial: np.ndarray
    mask_ok: dict = field(repr=False, default_factory=dict)

    def realized(self, u: int, mask: int) -> bool:
        return bool(self.mask_ok[mask][u])


def _phi_table(M, axis: Direction, j: int, estimator: Estimator) -> PhiTable:
    p = M.params
    ell, span = window_sizes(p, j)
    rows = int(5 * p.Delta) + 1
    seq = M.seq(axis).astype(np.int64)
    ok = _MaskCoverage(seq, ell, span)
    n_u = max(0, len(seq) - span)
    exact = estimator.exact_possible(M.m, rows, M.loops)

    def law(s, initial):
        """Color-set distribution of the window, exact or sampled."""
        if exact:
            return colorset_distribution(M.m, rows, s, M.loops)
        estimator.calls += 1
        stream = estimator.stream_for(("phi", axis.value, j, s, initial))
        paths = sample_continuations(M.m, rows, s, estimator.samples, stream, M.loops)
        masks = np.bitwise_or.reduce(np.left_shift(1, paths), axis=1)
        values, counts = np.unique(masks, return_counts=True)
        return {int(v): c / len(paths) for v, c in zip(values, counts)}

    def sup(initial: bool) -> np.ndarray:
        best = np.zeros(n_u)
        if n_u == 0:
            return best
        for s in ([None] if initial else range(1, M.m + 1)):
            acc = np.zeros(n_u)
            for S, prob in law(s, initial).items():
                acc += prob * ok[S]
            best = np.maximum(best, acc)
        return best

    return PhiTable(axis, j, ell, span, rows, sup(False), sup(True), ok)


def _colorset_masks(seq: np.ndarray, rows: int) -> np.ndarray:
    """``masks[b]`` = set of colors in ``seq[b : b + rows]``."""
    bits = np.left_shift(np.int64(1), seq.astype(np.int64))
    n = len(seq) - rows + 1
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    out = np.zeros(n, dtype=np.int64)
    for k in range(rows):
        out |= bits[k:k + n]
    return out


# ---------------------------------------------------------------- traps

def _pair_traps(traps: list[Trap], f: float) -> set[Trap]:
    out = set()
    if not traps:
        return out
    arr = np.array([(t.x0, t.x1, t.y0, t.y1) for t in traps], dtype=np.int64)
    order = np.argsort(arr[:, 0], kind="stable")
    arr = arr[order]
    for k in range(len(arr)):
        x0, x1, y0, y1 = arr[k]
        hi = np.searchsorted(arr[:, 0], x0 + f, side="right")
        cand = arr[k + 1:hi]
        if not len(cand):
            continue
        disjoint = ((cand[:, 0] > x1) | (cand[:, 1] < x0)) & ((cand[:, 2] > y1) | (cand[:, 3] < y0))
        near = np.maximum(np.abs(cand[:, 0] - x0), np.abs(cand[:, 2] - y0)) <= f
        for c in cand[disjoint & near]:
            out.add(Trap(int(min(x0, c[0])), int(max(x1, c[1])), int(min(y0, c[2])),
                         int(max(y1, c[3])), TrapKind.UNCORRELATED))
    return out


def point_pair_boxes(grid: np.ndarray, ox: int, oy: int, f: int,
                     first_only: bool = False) -> np.ndarray:
    """Bounding boxes ``(x0, x1, y0, y1)`` of closed-point pairs with distinct
    rows and columns within distance ``f``; duplicates removed."""
    parts = []
    h, w = grid.shape
    for dx in range(1, min(f, h - 1) + 1):
        for dy in range(-f, f + 1):
            if dy == 0 or abs(dy) >= w:
                continue
            if dy > 0:
                both = grid[:h - dx, :w - dy] & grid[dx:, dy:]
                base_y = 0
            else:
                both = grid[:h - dx, -dy:] & grid[dx:, :w + dy]
                base_y = -dy
            ii, jj = np.nonzero(both)
            if not len(ii):
                continue
            ya = jj + base_y
            yb = ya + dy
            parts.append(np.stack([ii + ox, ii + dx + ox, np.minimum(ya, yb) + oy,
                                   np.maximum(ya, yb) + oy], axis=1))
            if first_only:
                return parts[0]
    if not parts:
        return np.zeros((0, 4), dtype=np.int64)
    return np.unique(np.concatenate(parts).astype(np.int64), axis=0)


def _boxes_to_traps(boxes: np.ndarray, kind: TrapKind) -> list[Trap]:
    return [Trap(int(a), int(b), int(c), int(d), kind) for a, b, c, d in boxes]


def detect_uncorrelated(M, region=None) -> list[Trap]:
    """Minimal rectangles around pairs of ``M``-traps with disjoint projections
    whose starting points are within distance ``f``."""
    lo, hi = M.window
    x0, x1, y0, y1 = region or (lo, hi - 1, lo, hi - 1)
    f = int(math.floor(M.params.f))
    grid_fn = getattr(M.traps, "closed_grid", None)
    if grid_fn is not None:
        boxes = point_pair_boxes(grid_fn(x0, x1, y0, y1), max(x0, 0), max(y0, 0), f)
        return _boxes_to_traps(boxes, TrapKind.UNCORRELATED)
    return sorted(_pair_traps(M.traps.traps_in(x0, x1, y0, y1), f), key=_trap_key)


def uncorrelated_boxes(M, region, first_only: bool = False) -> np.ndarray | None:
    """Array form of :func:`detect_uncorrelated` for point traps, else None."""
    grid_fn = getattr(M.traps, "closed_grid", None)
    if grid_fn is None:
        return None
    x0, x1, y0, y1 = region
    return point_pair_boxes(grid_fn(x0, x1, y0, y1), max(x0, 0), max(y0, 0),
                            int(math.floor(M.params.f)), first_only)


def _trap_key(t: Trap):
    return (t.x0, t.x1, t.y0, t.y1, t.kind.value)


def _orientation_axes(orient: Direction) -> tuple[Direction, Direction]:
    """``(axis of I, axis of J)``; horizontal traps have ``I`` on the x-axis."""
    if orient is Direction.HORIZONTAL:
        return Direction.VERTICAL, Direction.HORIZONTAL
    return Direction.HORIZONTAL, Direction.VERTICAL


def _trap_rect(orient, u, span, b, rows, kind) -> Trap:
    if orient is Direction.HORIZONTAL:
        return Trap(u, u + span, b, b + rows - 1, kind)
    return Trap(b, b + rows - 1, u, u + span, kind)


def _covered_general(M, orient, u, span, ell, b, rows) -> bool:
    """Covering event from ``M``'s own trap list (any level)."""
    i_axis, _ = _orientation_axes(orient)
    if orient is Direction.HORIZONTAL:
        traps = M.traps.traps_in(u, u + span, b, b + rows - 1)
        spans = [(t.x0, t.x1) for t in traps]
    else:
        traps = M.traps.traps_in(b, b + rows - 1, u, u + span)
        spans = [(t.y0, t.y1) for t in traps]
    need = set(range(u, u + span - ell + 2))
    for s0, s1 in spans:
        for p in range(max(u, s1 - ell + 1), min(s0, u + span - ell + 1) + 1):
            need.discard(p)
    return not need


class TrapContext:
    """Shared state for trap detection at one scale-up (tables, notes)."""

    def __init__(self, M, estimator: Estimator):
        self.M = M
        self.estimator = estimator
        self.base = type(M.traps).__name__ == "BaseTraps"
        self.substitutable = getattr(M.traps, "substitutable", False)
        self._phi = {}
        self.notes: list[str] = []

    def phi(self, axis: Direction, j: int) -> PhiTable:
        key = (axis, j)
        if key not in self._phi:
            self._phi[key] = _phi_table(self.M, axis, j, self.estimator)
        return self._phi[key]

    def note(self, text: str):
        if text not in self.notes:
            self.notes.append(text)


def _general_phi(M, estimator, orient, u, span, ell, b, rows, initial) -> float:
    _, j_axis = _orientation_axes(orient)

    def event(paths):
        out = np.zeros(len(paths), dtype=bool)
        for r, path in enumerate(paths):
            alt = M.substitute(j_axis, b, path)
            out[r] = _covered_general(alt, orient, u, span, ell, b, rows)
        return out

    return estimator.sup_prob(event, m=M.m, length=rows, loops=M.loops, initial=initial,
                              key=("correl", orient.value, u, b, span))


def detect_correlated(M, estimator: Estimator, region=None, ctx: TrapContext | None = None
                      ) -> list[Trap]:
    """Correlated traps of both types and orientations contained in ``region``."""
    ctx = ctx or TrapContext(M, estimator)
    lo, hi = M.window
    x0, x1, y0, y1 = region or (lo, hi - 1, lo, hi - 1)
    w2 = M.params.w ** 2
    rows = int(5 * M.params.Delta) + 1
    out = []
    if not ctx.substitutable:
        ctx.note(f"level {M.level + 1} correlated traps not computed: level-{M.level} traps "
                 "cannot be recomputed under resampling")
        return out
    for orient in (Direction.HORIZONTAL, Direction.VERTICAL):
        i_axis, j_axis = _orientation_axes(orient)
        (ilo, ihi), (jlo, jhi) = ((x0, x1), (y0, y1)) if i_axis is Direction.VERTICAL \
            else ((y0, y1), (x0, x1))
        jseq = M.seq(j_axis)
        for j in (1, 2):
            ell, span = window_sizes(M.params, j)
            if ctx.base:
                tab = ctx.phi(i_axis, j)
                masks = _colorset_masks(jseq, rows)
                u_lo, u_hi = max(ilo, 0), min(ihi - span, len(tab.cond) - 1)
                if u_hi < u_lo:
                    continue
                cand = np.flatnonzero(np.minimum(tab.cond[u_lo:u_hi + 1],
                                                 tab.initial[u_lo:u_hi + 1]) <= w2) + u_lo
                for u in (int(v) for v in cand):
                    for b in range(max(jlo, 0), min(jhi - rows + 1, len(masks) - 1) + 1):
                        bound = tab.initial[u] if b == 0 else tab.cond[u]
                        if bound <= w2 and tab.realized(u, int(masks[b])):
                            out.append(_trap_rect(orient, u, span, b, rows, KIND_BY_TYPE[j]))
                continue
            iseq_len = len(M.seq(i_axis))
            for u in range(max(ilo, 0), min(ihi - span, iseq_len - span - 1) + 1):
                for b in range(max(jlo, 0), min(jhi - rows + 1, len(jseq) - rows) + 1):
                    if not _covered_general(M, orient, u, span, ell, b, rows):
                        continue
                    phi = _general_phi(M, estimator, orient, u, span, ell, b, rows, b == 0)
                    if phi <= w2:
                        out.append(_trap_rect(orient, u, span, b, rows, KIND_BY_TYPE[j]))
    return sorted(set(out), key=_trap_key)


def _potential_walls(M, d: Direction, start: int) -> list[WallValue]:
    """Light barriers of direction ``d`` starting at ``start`` that could be walls.

    A barrier counts as a potential wall when it is a wall or is disjoint from
    every wall, so designating it would keep the walls disjoint.
    """
    walls = M.walls[d]
    out = []
    for w in M.barriers[d]:
        if w.start != start or not M.light(w):
            continue
        if w.is_wall or not any(v.body.intersects(w.body) for v in walls):
            out.append(w)
    return out


def missing_hole_event_holds(M, orient: Direction, u: int, b: int) -> bool:
    """Event: a light potential wall starts at ``b + Delta`` across ``J`` and no
    good hole fits inside ``I = [u, u + g]``."""
    Delta = int(M.params.Delta)
    g = int(M.params.g)
    wall_dir = Direction.HORIZONTAL if orient is Direction.HORIZONTAL else Direction.VERTICAL
    search = Interval(max(u + Delta - 1, -1), u + g - Delta)
    if search.b <= search.a:
        search = None
    for w in _potential_walls(M, wall_dir, b + Delta):
        if w.end > b + 3 * Delta:
            continue
        if search is None or not any(h.good for h in iter_holes(M, w, search)):
            return True
    return False


def detect_missing_hole(M, estimator: Estimator, region=None, ctx: TrapContext | None = None
                        ) -> list[Trap]:
    """Traps ``I x J`` (``|I| = g``, ``|J| = 3 Delta``) where good holes are missing."""
    ctx = ctx or TrapContext(M, estimator)
    if not any(M.barriers[d] for d in Direction):
        return []
    if not ctx.substitutable:
        ctx.note(f"level {M.level + 1} missing-hole traps not computed: level-{M.level} "
                 "traps cannot be recomputed under resampling")
        return []
    lo, hi = M.window
    x0, x1, y0, y1 = region or (lo, hi - 1, lo, hi - 1)
    Delta, g = int(M.params.Delta), int(M.params.g)
    rows = 3 * Delta + 1
    w2 = M.params.w ** 2
    out = []
    for orient in (Direction.HORIZONTAL, Direction.VERTICAL):
        i_axis, j_axis = _orientation_axes(orient)
        (ilo, ihi), (jlo, jhi) = ((x0, x1), (y0, y1)) if i_axis is Direction.VERTICAL \
            else ((y0, y1), (x0, x1))
        wall_dir = j_axis
        starts = sorted({w.start for w in M.barriers[wall_dir] if M.light(w)})
        for s in starts:
            b = s - Delta
            if b < max(jlo, 0) or b + rows - 1 > jhi:
                continue
            for u in range(max(ilo, 0), ihi - g + 1):
                if not missing_hole_event_holds(M, orient, u, b):
                    continue

                def event(paths, u=u, b=b):
                    res = np.zeros(len(paths), dtype=bool)
                    for r, path in enumerate(paths):
                        alt = M.substitute(j_axis, b, path)
                        res[r] = missing_hole_event_holds(alt, orient, u, b)
                    return res

                phi = estimator.sup_prob(event, m=M.m, length=rows, loops=M.loops,
                                         initial=(b == 0), key=("hole", orient.value, u, b))
                if phi <= w2:
                    out.append(_trap_rect(orient, u, g, b, rows, TrapKind.MISSING_HOLE))
    return sorted(set(out), key=_trap_key)


# ---------------------------------------------------------------- walls

def is_external(M, d: Direction, a: int, b: int) -> bool:
    iv = Interval(a, b) if b > a else None
    return iv is None or not any(w.body.intersects(iv) for w in M.walls[d])


def is_hop(M, d: Direction, a: int, b: int) -> bool:
    """Inner clean and containing no wall; the empty interval is a hop."""
    if b <= a:
        return True
    if any(a <= w.start and w.end <= b for w in M.walls[d]):
        return False
    return M.cleanness.inner_clean(d, a, b)


def is_dominant(M, wall: WallValue) -> bool:
    """Surrounded by external intervals of size ``>= Delta`` (or at the line start)."""
    D = int(math.ceil(M.params.Delta))
    d = wall.direction
    others = [w for w in M.walls[d] if w.body != wall.body]

    def free(a, b):
        iv = Interval(a, b)
        return not any(w.body.intersects(iv) for w in others)

    left = wall.start - D < -1 and (wall.start == -1 or free(-1, wall.start)) \
        or (wall.start - D >= -1 and free(wall.start - D, wall.start))
    right = free(wall.end, wall.end + D)
    return left and right


def _external_hop(M, d, a, b) -> bool:
    return a >= -1 and is_external(M, d, a, b) and is_hop(M, d, a, b)


def prewall_ok(M, d: Direction, body: Interval) -> bool:
    """Conditions (a) and (b) for an emerging barrier to be a pre-wall."""
    D = int(math.ceil(M.params.Delta))
    u, v = body.a, body.b
    cond_a = _external_hop(M, d, u, v)
    if not cond_a:
        for w in M.walls[d]:
            if not (body.contains(w.body) and M.light(w) and is_dominant(M, w)):
                continue
            h1, h2 = (u, w.start), (w.end, v)
            parts = [h for h in (h1, h2) if h[1] > h[0]]
            if parts and all(h[1] - h[0] >= D and _external_hop(M, d, *h) for h in parts):
                cond_a = True
                break
    if not cond_a:
        return False
    left = any(w.end == u for w in M.walls[d]) or any(
        _external_hop(M, d, u - s, u) for s in range(D, 3 * D + 1) if u - s >= -1)
    right = any(w.start == v for w in M.walls[d]) or any(
        _external_hop(M, d, v, v + s) for s in range(D, 3 * D + 1))
    return left and right


def designate_walls(prewalls: dict[int, list[WallValue]]) -> list[WallValue]:
    """Greedy disjoint designation: type 1, then 3, then 2, each in window order."""
    chosen: list[tuple[int, int]] = []
    out = []
    for j in (1, 3, 2):
        for w in sorted(prewalls.get(j, []), key=lambda v: (v.start, v.end)):
            k = bisect.bisect_left(chosen, (w.start, w.end))
            clash = (k > 0 and chosen[k - 1][1] > w.start) or \
                    (k < len(chosen) and chosen[k][0] < w.end)
            if not clash:
                chosen.insert(k, (w.start, w.end))
                out.append(w.as_wall())
    return out


def _emerging_bodies(phi: np.ndarray, span: int, D: int, w2: float, n: int):
    for up in np.flatnonzero(phi > w2):
        up = int(up)
        vp = up + span
        for a in range(up - 2 * D, up):
            if a < -1:
                continue
            for b in range(vp, vp + 2 * D):
                if b < n:
                    yield a, b


def derive_emerging(M, estimator: Estimator, ctx: TrapContext | None = None):
    """Emerging barriers and designated walls per direction, rank ``tau' R``."""
    ctx = ctx or TrapContext(M, estimator)
    p = M.params
    D = int(math.ceil(p.Delta))
    rank = p.R_hat
    w2 = p.w ** 2
    barriers = {d: [] for d in Direction}
    walls = {d: [] for d in Direction}
    if not ctx.base:
        if ctx.substitutable:
            ctx.note(f"level {M.level + 1} emerging barriers: exact search implemented for "
                     "base traps only; none derived")
        else:
            ctx.note(f"level {M.level + 1} emerging barriers not computed: level-{M.level} "
                     "traps cannot be recomputed under resampling")
        return barriers, walls
    for d in Direction:
        n = len(M.seq(d))
        pre = {}
        seen = set()
        for j in (1, 2):
            tab = ctx.phi(d, j)
            for a, b in _emerging_bodies(tab.cond, tab.span, D, w2, n):
                if (a, b, j) in seen:
                    continue
                seen.add((a, b, j))
                wv = WallValue(Interval(a, b), rank, d, "barrier", f"emerging-{j}")
                barriers[d].append(wv)
                if prewall_ok(M, d, wv.body):
                    pre.setdefault(j, []).append(wv)
        # type 3 needs walls of the other direction to exist at this level
        if M.walls[d.other]:
            ctx.note(f"level {M.level + 1} type-3 emerging barriers not searched")
        walls[d] = designate_walls(pre)
        wall_keys = {(w.start, w.end, w.kind) for w in walls[d]}
        barriers[d] = [w.as_wall() if (w.start, w.end, w.kind) in wall_keys else w
                       for w in barriers[d]]
    return barriers, walls


# ---------------------------------------------------------------- compounds

def compound_index(d: int, dtab: tuple[int, ...]) -> int:
    """Largest ``i`` with ``d_i <= d``."""
    return bisect.bisect_right(dtab, d) - 1


@dataclass
class CompoundSummary:
    """Bounds for compound barriers too numerous to list."""

    direction: Direction
    count: int
    min_rank: float
    max_rank: float
    max_size: int
    rank_window_ok: bool


def _arrays(ws):
    if not ws:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
    return (np.array([w.start for w in ws], np.int64), np.array([w.end for w in ws], np.int64),
            np.array([w.rank for w in ws], float))


def _pairs(first, second, f):
    """Index pairs ``(k1, k2)`` with ``0 <= start(second) - end(first) <= f``."""
    s1, e1, _ = _arrays(first)
    s2, e2, _ = _arrays(second)
    order = np.argsort(s2, kind="stable")
    s2s = s2[order]
    lo = np.searchsorted(s2s, e1, side="left")
    hi = np.searchsorted(s2s, e1 + f, side="right")
    return lo, hi, order


def _make(w1: WallValue, w2: WallValue, dtab, status: str) -> WallValue:
    d = w2.start - w1.end
    i = compound_index(d, dtab)
    return WallValue(Interval(min(w1.start, w2.start), max(w1.end, w2.end)),
                     w1.rank + w2.rank - i, w1.direction, status,
                     f"compound<{w1.rank:g},{w2.rank:g},{i}>")


def _neighbors(M, w1: WallValue, w2: WallValue) -> bool:
    return w2.start >= w1.end and is_hop(M, w1.direction, w1.end, w2.start)


def derive_compound(M, emerging, materialize_limit: int = 200_000):
    """Compound barriers and walls per direction (two passes).

    Returns ``(barriers, walls, summaries)``; when a direction has more
    compound barriers than ``materialize_limit`` its barriers are replaced by a
    :class:`CompoundSummary` and only the walls are listed.
    """
    p = M.params
    f = int(math.floor(p.f))
    dtab = jump_table(p.lam, 64)
    i_cap = math.log(p.f) / math.log(p.lam) if p.f > 1 else 0.0
    e_barriers, e_walls = emerging
    barriers, walls, summaries = {}, {}, {}
    for d in Direction:
        light_b = [w for w in M.barriers[d] if M.light(w)]
        light_w = [w for w in M.walls[d] if M.light(w)]
        any_b = list(M.barriers[d]) + list(e_barriers[d])
        any_w = list(M.walls[d]) + list(e_walls[d])
        # walls: always listed
        pass1_w = []
        lo, hi, order = _pairs(light_w, any_w, f)
        for k, w1 in enumerate(light_w):
            for idx in order[lo[k]:hi[k]]:
                w2 = any_w[idx]
                if w2 is not w1 and _neighbors(M, w1, w2):
                    pass1_w.append(_make(w1, w2, dtab, "wall"))
        pool_w = any_w + pass1_w
        pass2_w = []
        lo, hi, order = _pairs(pool_w, light_w, f)
        for k, w1 in enumerate(pool_w):
            for idx in order[lo[k]:hi[k]]:
                w2 = light_w[idx]
                if w2 is not w1 and _neighbors(M, w1, w2):
                    pass2_w.append(_make(w1, w2, dtab, "wall"))
        walls[d] = sorted(set(pass1_w + pass2_w), key=lambda w: (w.start, w.end, w.rank))
        # barriers: count first
        lo1, hi1, order1 = _pairs(light_b, any_b, f)
        n1 = int(np.sum(hi1 - lo1))
        if n1 <= materialize_limit:
            pass1 = []
            for k, w1 in enumerate(light_b):
                for idx in order1[lo1[k]:hi1[k]]:
                    w2 = any_b[idx]
                    if w2 is not w1:
                        pass1.append(_make(w1, w2, dtab, "barrier"))
            pool = any_b + pass1
            lo2, hi2, order2 = _pairs(pool, light_b, f)
            n2 = int(np.sum(hi2 - lo2))
        else:
            pass1, n2 = None, None
        if pass1 is not None and n2 <= materialize_limit:
            pass2 = []
            for k, w1 in enumerate(pool):
                for idx in order2[lo2[k]:hi2[k]]:
                    w2 = light_b[idx]
                    if w2 is not w1:
                        pass2.append(_make(w1, w2, dtab, "barrier"))
            objs = {}
            for w in pass1 + pass2:
                objs.setdefault(w.key(), w)
            for w in walls[d]:
                objs[w.key()] = w
            barriers[d] = sorted(objs.values(), key=lambda w: (w.start, w.end, w.rank))
            continue
        barriers[d] = list(walls[d])
        summaries[d] = _summary(d, light_b, any_b, f, dtab, i_cap, n1, n2)
    return barriers, walls, summaries


def _summary(d, light_b, any_b, f, dtab, i_cap, n1, n2) -> CompoundSummary:
    """Rank and size bounds over all compound barriers without listing them."""
    i_max = compound_index(f, dtab)
    r_light = {w.rank for w in light_b}
    r_any = {w.rank for w in any_b}
    s_light = max((w.size for w in light_b), default=0)
    s_any = max((w.size for w in any_b), default=0)
    lo1 = min(r_light) + min(r_any) - i_max
    hi1 = max(r_light) + max(r_any)
    size1 = s_light + f + s_any
    lo2 = min(min(r_any), lo1) + min(r_light) - i_max
    hi2 = max(max(r_any), hi1) + max(r_light)
    size2 = max(s_any, size1) + f + s_light
    # every compound rank r1 + r2 - i has i <= i_max and d_{i_max} <= f
    ok = dtab[i_max] <= f and i_max <= i_cap + 1e-9
    count = n1 if n2 is None else n1 + n2
    return CompoundSummary(d, count, min(lo1, lo2), max(hi1, hi2), max(size1, size2), ok)
