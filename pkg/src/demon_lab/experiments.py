"""Monte Carlo harness: blocking curves, parameter sweeps and tail fits.

Trial ``k`` always draws from stream ``(master_seed, k)``: first the ``X``
walk (or ``z0``), then ``Y`` (or ``z1``) from the same stream. Counts are
therefore independent of batching and of the number of workers.
"""
from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import InsufficientData, InvalidParameter
from .percolation import _escape_flags, binary_compatible
from .rng import RngStream
from .walks import bernoulli_batch, walk_batch

__all__ = [
    "CurvePoint",
    "TailFit",
    "FitComparison",
    "wilson_interval",
    "blocking_curve",
    "curve_from_instances",
    "first_blocking_mass",
    "tail_fit",
    "exponential_fit",
    "compare_fits",
    "format_fit_report",
    "sweep",
    "CSV_HEADER",
    "format_csv",
    "write_csv",
    "read_csv",
]

CSV_HEADER = ("kind", "m_or_p", "n", "trials", "successes", "estimate", "ci_low", "ci_high",
              "seed")
CHUNK = 2000


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class CurvePoint:
    """Success count at one ``(m or p, n)`` setting.

    ``escapes`` counts escapes for walk curves and compatible pairs for the
    binary variant; ``kind`` says which.
    """

    m: float
    n: int
    trials: int
    escapes: int
    kind: str = "escape"
    seed: int = 0
    partial: bool = False

    def __post_init__(self):
        if not 0 <= self.escapes <= self.trials:
            raise InvalidParameter("escapes must lie in 0..trials")

    @property
    def p_escape(self) -> float:
        return self.escapes / self.trials if self.trials else float("nan")

    @property
    def standard_error(self) -> float:
        p = self.p_escape
        return math.sqrt(p * (1 - p) / self.trials) if self.trials else float("nan")

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.escapes, self.trials)


def _walk_chunk(args) -> np.ndarray:
    m, n_max, loops, seed, lo, hi = args
    streams = [RngStream(seed, k) for k in range(lo, hi)]
    x = walk_batch(m, n_max + 1, loops, streams)
    y = walk_batch(m, n_max + 1, loops, streams)
    flags = np.zeros((hi - lo, n_max), dtype=bool)
    for r in range(hi - lo):
        flags[r] = _escape_flags(x[r], y[r], n_max)
    return flags.sum(axis=0)


def _binary_chunk(args) -> int:
    p, horizon, seed, lo, hi = args
    streams = [RngStream(seed, k) for k in range(lo, hi)]
    z0 = bernoulli_batch(p, horizon, streams)
    z1 = bernoulli_batch(p, horizon, streams)
    return sum(binary_compatible(z0[r], z1[r], horizon) for r in range(hi - lo))


def _run_chunks(fn, tasks, threads, deadline):
    """Evaluate ``fn`` on tasks in order; stops early once ``deadline`` passes."""
    results = []
    threads = threads or os.cpu_count() or 1
    if threads <= 1 or len(tasks) <= 1:
        for task in tasks:
            if deadline is not None and time.monotonic() > deadline:
                break
            results.append(fn(task))
        return results
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, task) for task in tasks]
        for fut in futures:
            if deadline is not None and time.monotonic() > deadline:
                for rest in futures:
                    rest.cancel()
                break
            results.append(fut.result())
    return results


def _chunks(trials: int) -> list[tuple[int, int]]:
    return [(lo, min(trials, lo + CHUNK)) for lo in range(0, trials, CHUNK)]


def blocking_curve(m: int, n_list, trials: int, master_seed: int, loops: bool = False,
                   threads: int | None = 1, time_limit: float | None = None) -> list[CurvePoint]:
    """Escape frequency at each ``n`` in ``n_list`` from one pass per trial."""
    n_list = [int(n) for n in n_list]
    if trials < 1:
        raise InvalidParameter("trials must be at least 1")
    if not n_list or any(n < 1 for n in n_list) or n_list != sorted(n_list):
        raise InvalidParameter("n_list must be a non-empty ascending list of positive sizes")
    n_max = n_list[-1]
    deadline = None if time_limit is None else time.monotonic() + time_limit
    tasks = [(m, n_max, loops, master_seed, lo, hi) for lo, hi in _chunks(trials)]
    results = _run_chunks(_walk_chunk, tasks, threads, deadline)
    done = sum(hi - lo for _, _, _, _, lo, hi in tasks[:len(results)])
    counts = np.sum(results, axis=0) if results else np.zeros(n_max, dtype=int)
    return [CurvePoint(m, n, done, int(counts[n - 1]), "escape", master_seed, done < trials)
            for n in n_list]


def curve_from_instances(instances, n_list, label: float = 0, seed: int = 0) -> list[CurvePoint]:
    """Blocking curve over explicitly supplied ``(x, y)`` pairs."""
    n_list = [int(n) for n in n_list]
    n_max = max(n_list)
    counts = np.zeros(n_max, dtype=int)
    trials = 0
    for x, y in instances:
        counts += np.asarray(_escape_flags(np.asarray(x), np.asarray(y), n_max), dtype=int)
        trials += 1
    return [CurvePoint(label, n, trials, int(counts[n - 1]), "escape", seed) for n in n_list]


def sweep(variable: str, values, horizon: int, trials: int, master_seed: int,
          loops: bool = False, threads: int | None = 1,
          time_limit: float | None = None) -> list[CurvePoint]:
    """Success frequency at ``horizon`` for each value of ``m`` or ``p``.

    Every value reuses streams ``0..trials-1``, so the sweep is a coupled
    comparison: for ``p`` a larger value only turns zeros into ones.
    """
    values = list(values)
    if not values:
        raise InvalidParameter("sweep values must be non-empty")
    if horizon < 1 or trials < 1:
        raise InvalidParameter("horizon and trials must be at least 1")
    out = []
    if variable == "m":
        for mv in values:
            out.extend(blocking_curve(int(mv), [horizon], trials, master_seed, loops, threads,
                                      time_limit))
        return out
    if variable != "p":
        raise InvalidParameter("sweep variable must be 'm' or 'p'")
    for pv in values:
        if not 0 <= pv <= 1:
            raise InvalidParameter(f"p={pv} outside [0, 1]")
        deadline = None if time_limit is None else time.monotonic() + time_limit
        tasks = [(float(pv), horizon, master_seed, lo, hi) for lo, hi in _chunks(trials)]
        results = _run_chunks(_binary_chunk, tasks, threads, deadline)
        done = sum(t[4] - t[3] for t in tasks[:len(results)])
        out.append(CurvePoint(float(pv), horizon, done, int(sum(results)), "binary",
                              master_seed, done < trials))
    return out


def first_blocking_mass(curve: list[CurvePoint]) -> tuple[np.ndarray, np.ndarray]:
    """``q_n = p(n-1) - p(n)`` over consecutive points of one curve.

    The curve must cover consecutive ``n``; ``p(0)`` is taken as 1 when the
    curve starts at ``n = 1``.
    """
    ns = np.array([c.n for c in curve])
    ps = np.array([c.p_escape for c in curve])
    if ns.size and ns[0] == 1:
        ns_prev = np.concatenate([[0], ns[:-1]])
        ps_prev = np.concatenate([[1.0], ps[:-1]])
    else:
        ns_prev, ps_prev = ns[:-1], ps[:-1]
        ns, ps = ns[1:], ps[1:]
    if np.any(ns - ns_prev != 1):
        raise InvalidParameter("first-blocking mass needs consecutive sizes")
    return ns, ps_prev - ps


@dataclass(frozen=True)
class TailFit:
    """Least-squares line ``log q = intercept + exponent * x``.

    For the power-law model ``x = log n``; for the exponential model ``x = n``.
    """

    exponent: float
    intercept: float
    r_squared: float
    points: int
    model: str = "power"


def _line_fit(xs: np.ndarray, ys: np.ndarray, model: str) -> TailFit:
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (intercept + slope * xs)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return TailFit(float(slope), float(intercept), r2, int(xs.size), model)


def _positive(ns, qs):
    ns = np.asarray(ns, dtype=float)
    qs = np.asarray(qs, dtype=float)
    keep = (qs > 0) & (ns > 0)
    if keep.sum() < 3:
        raise InsufficientData("need at least 3 strictly positive mass points")
    return ns[keep], qs[keep]


def tail_fit(ns, qs) -> TailFit:
    """Power-law fit of ``q_n`` on log-log axes."""
    ns, qs = _positive(ns, qs)
    return _line_fit(np.log(ns), np.log(qs), "power")


def exponential_fit(ns, qs) -> TailFit:
    """Fit ``log q_n`` linearly in ``n``; the exponent is the log decay rate."""
    ns, qs = _positive(ns, qs)
    return _line_fit(ns, np.log(qs), "exponential")


@dataclass(frozen=True)
class FitComparison:
    power: TailFit
    exponential: TailFit

    @property
    def preferred(self) -> str:
        return "power" if self.power.r_squared >= self.exponential.r_squared else "exponential"


def compare_fits(ns, qs) -> FitComparison:
    return FitComparison(tail_fit(ns, qs), exponential_fit(ns, qs))


def format_fit_report(cmp: FitComparison, **extra) -> str:
    lines = [f"{key}={value}" for key, value in extra.items()]
    for fit in (cmp.power, cmp.exponential):
        lines += [f"{fit.model}_exponent={fit.exponent:.10g}",
                  f"{fit.model}_intercept={fit.intercept:.10g}",
                  f"{fit.model}_r_squared={fit.r_squared:.10g}",
                  f"{fit.model}_points={fit.points}"]
    lines.append(f"preferred={cmp.preferred}")
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return format(x, ".10g")


def format_csv(points: list[CurvePoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for pt in points:
        lo, hi = pt.interval
        label = str(int(pt.m)) if pt.kind == "escape" else _fmt(pt.m)
        writer.writerow([pt.kind, label, pt.n, pt.trials, pt.escapes, _fmt(pt.p_escape),
                         _fmt(lo), _fmt(hi), pt.seed])
    return buf.getvalue()


def write_csv(points: list[CurvePoint], path) -> None:
    Path(path).write_text(format_csv(points))


def read_csv(path) -> list[CurvePoint]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise InvalidParameter("unexpected CSV header")
        return [CurvePoint(float(row["m_or_p"]), int(row["n"]), int(row["trials"]),
                           int(row["successes"]), row["kind"], int(row["seed"]))
                for row in reader]
