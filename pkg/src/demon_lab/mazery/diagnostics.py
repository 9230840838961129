"""Advisory Monte Carlo diagnostics of the probability bounds.

The bounds are only guaranteed for very large parameters, so nothing here
is an assertion: each estimate is compared to its bound through a 95%
Wilson interval and labelled pass, fail or indeterminate.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from ..experiments import wilson_interval
from ..params import ExponentSet, bound_functions
from ..rng import RngStream
from .holes import find_hole
from .objects import Direction, Interval

__all__ = ["Diagnostic", "DiagnosticsReport", "probability_diagnostics", "verdict"]

PASS, FAIL, INDETERMINATE = "pass", "fail", "indeterminate"


@dataclass(frozen=True)
class Diagnostic:
    """One estimated frequency against a bound (``upper`` or ``lower``)."""

    name: str
    successes: int
    trials: int
    bound: float
    side: str
    verdict: str
    detail: str = ""

    @property
    def estimate(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.trials) if self.trials else (0.0, 1.0)

    def line(self) -> str:
        lo, hi = self.interval
        rel = "<=" if self.side == "upper" else ">="
        text = (f"{self.verdict.upper():13s} {self.name}: {self.successes}/{self.trials} = "
                f"{self.estimate:.4g} [{lo:.4g}, {hi:.4g}] {rel} {self.bound:.4g}")
        return text + (f" ({self.detail})" if self.detail else "")


@dataclass
class DiagnosticsReport:
    level: int
    items: list[Diagnostic] = field(default_factory=list)

    def by_name(self, name: str) -> Diagnostic:
        return next(d for d in self.items if d.name == name)

    def lines(self) -> list[str]:
        return [f"level {self.level} probability diagnostics (advisory)"] + [
            d.line() for d in self.items]


def verdict(successes: int, trials: int, bound: float, side: str = "upper") -> str:
    """Compare a frequency to a bound using the Wilson interval."""
    if trials == 0:
        return INDETERMINATE
    lo, hi = wilson_interval(successes, trials)
    if side == "upper":
        return PASS if hi <= bound else FAIL if lo > bound else INDETERMINATE
    return PASS if lo >= bound else FAIL if hi < bound else INDETERMINATE


def _make(name, k, n, bound, side="upper", detail="") -> Diagnostic:
    return Diagnostic(name, k, n, bound, side, verdict(k, n, bound, side), detail)


def _skip(name, bound, side, detail) -> Diagnostic:
    return Diagnostic(name, 0, 0, bound, side, INDETERMINATE, detail)


def _trap_start(M, stream, trials) -> Diagnostic:
    p = M.params
    if not getattr(M.traps, "complete", True):
        return _skip("trap-start", p.w, "upper", "traps of this level are not fully computed")
    lo, hi = M.window
    D = int(math.ceil(p.Delta))
    if hi - lo < 1:
        return _skip("trap-start", p.w, "upper", "empty window")
    hits = 0
    for _ in range(trials):
        a = lo + stream.uniform_int(hi - lo)
        b = lo + stream.uniform_int(hi - lo)
        found = M.traps.traps_in(a, a + D, b, b + D)
        hits += any(t.x0 == a and t.y0 == b for t in found)
    return _make("trap-start", hits, trials, p.w)


def _barrier_start(M, stream, trials, exps) -> Diagnostic:
    """Most frequent rank's start frequency against ``p(r)``."""
    name = "barrier-start"
    if M.lazy_barriers:
        return _skip(name, float("nan"), "upper", "barriers kept only as a summary")
    ranks = Counter(round(w.rank, 9) for d in Direction for w in M.barriers[d])
    if not ranks:
        bound = bound_functions(exps, M.params.R).p
        return _make(name, 0, trials, bound, detail="no barriers")
    r = ranks.most_common(1)[0][0]
    bound = bound_functions(exps, r).p
    lo, hi = M.window
    starts = {d: {w.start for w in M.barriers[d] if round(w.rank, 9) == r} for d in Direction}
    hits = 0
    for k in range(trials):
        d = Direction(k % 2)
        hits += (lo + stream.uniform_int(hi - lo)) in starts[d]
    return _make(name, hits, trials, bound, detail=f"rank {r:g}")


def _unclean(M, stream, trials) -> Diagnostic:
    p = M.params
    lo, hi = M.window
    D = max(1, int(math.ceil(p.Delta)))
    C = M.cleanness
    hits = 0
    for k in range(trials):
        d = Direction(k % 2)
        a = lo + stream.uniform_int(max(1, hi - lo - D))
        hits += not (C.strong_left(d, a, a + D) and C.strong_right(d, a, a + D))
    return _make("not-strongly-clean", hits, trials, p.q / 2)


def _hole(M, stream, trials, exps) -> Diagnostic:
    """Frequency of a hole through a sampled horizontal wall, against ``(c-b)^chi h(r)``."""
    name = "hole"
    walls = M.walls[Direction.HORIZONTAL]
    if not walls:
        return _skip(name, 0.0, "lower", "no horizontal walls")
    lo, hi = M.window
    bounds, hits = [], 0
    for _ in range(trials):
        wall = walls[stream.uniform_int(len(walls))]
        span = max(1, wall.size)
        a = lo + stream.uniform_int(max(1, hi - lo - 2 * span))
        b, c = a + math.ceil(span / 2), a + span + 1
        bounds.append((c - b) ** exps.chi * bound_functions(exps, wall.rank).h)
        hits += find_hole(M, wall, Interval(b - 1, c)) is not None
    return _make(name, hits, trials, min(bounds), "lower")


def probability_diagnostics(M, trials: int = 500, stream: RngStream | None = None,
                            exps: ExponentSet | None = None) -> DiagnosticsReport:
    """Frequencies of trap starts, barrier starts, uncleanness and holes.

    ``exps`` supplies the constants of ``p(r)`` and ``h(r)``.
    """
    stream = stream or RngStream(0, M.level)
    exps = exps or ExponentSet()
    report = DiagnosticsReport(M.level)
    report.items.append(_trap_start(M, stream.spawn(1), trials))
    report.items.append(_barrier_start(M, stream.spawn(2), trials, exps))
    report.items.append(_unclean(M, stream.spawn(3), trials))
    report.items.append(_hole(M, stream.spawn(4), max(1, trials // 10), exps))
    return report
