"""Conditional probabilities over a window of one walk.

An event is a vectorized predicate: it receives an ``(N, L)`` array whose
rows are candidate values ``Y(b), ..., Y(b+L-1)`` and returns ``N`` booleans.
The condition fixes ``Y(b-1) = s``; ``s = None`` means the window starts the
walk and its first value follows the uniform initial distribution.
"""
from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..exceptions import InvalidParameter
from ..experiments import wilson_interval
from ..rng import RngStream, rejection_limit
from .objects import CondProbEstimate

__all__ = [
    "path_count",
    "enumerate_continuations",
    "sample_continuations",
    "estimate_cond_prob",
    "colorset_distribution",
    "Estimator",
]

DEFAULT_BUDGET = 1_000_000
DEFAULT_SAMPLES = 10_000


def path_count(m: int, length: int, s: int | None, loops: bool = False) -> int:
    step = m if loops else m - 1
    if s is None:
        return m * step ** (length - 1)
    return step ** length


def _check(m: int, length: int, s: int | None, loops: bool):
    if m < (1 if loops else 2):
        raise InvalidParameter("too few colors for a walk")
    if length < 1:
        raise InvalidParameter("window length must be at least 1")
    if s is not None and not 1 <= s <= m:
        raise InvalidParameter(f"conditioning color {s} outside 1..{m}")


def _step_table(m: int, loops: bool) -> np.ndarray:
    """``table[cur, r]``: next color after ``cur`` for step choice ``r``."""
    if loops:
        return np.tile(np.arange(1, m + 1), (m + 1, 1))
    r = np.arange(m - 1)
    cur = np.arange(m + 1)[:, None]
    return np.where(r + 1 < cur, r + 1, r + 2)


def enumerate_continuations(m: int, length: int, s: int | None, loops: bool = False) -> np.ndarray:
    """All equally likely windows, one per row."""
    _check(m, length, s, loops)
    table = _step_table(m, loops)
    if s is None:
        paths = np.arange(1, m + 1, dtype=np.int64)[:, None]
    else:
        paths = table[s][:, None].astype(np.int64)
    for _ in range(length - 1):
        k = table.shape[1]
        nxt = table[paths[:, -1]]  # (N, k)
        paths = np.concatenate([np.repeat(paths, k, axis=0), nxt.reshape(-1, 1)], axis=1)
    return paths


def _uniform_block(stream: RngStream, k: int, shape) -> np.ndarray:
    raw = stream.draws(int(np.prod(shape))).reshape(shape)
    limit = rejection_limit(k)
    out = (raw % np.uint64(k)).astype(np.int64)
    if limit < (1 << 64):
        for idx in zip(*np.nonzero(raw >= np.uint64(limit))):
            out[idx] = stream.uniform_int(k)
    return out


def sample_continuations(m: int, length: int, s: int | None, samples: int, stream: RngStream,
                         loops: bool = False) -> np.ndarray:
    _check(m, length, s, loops)
    table = _step_table(m, loops)
    k = table.shape[1]
    out = np.empty((samples, length), dtype=np.int64)
    if s is None:
        out[:, 0] = _uniform_block(stream, m, (samples,)) + 1
        start = 1
        cur = out[:, 0]
    else:
        cur = np.full(samples, s, dtype=np.int64)
        start = 0
    if length > start:
        choices = _uniform_block(stream, k, (samples, length - start))
        for t in range(start, length):
            cur = table[cur, choices[:, t - start]]
            out[:, t] = cur
    return out


def estimate_cond_prob(event, condition: int | None, mode: str = "exact",
                       budget: int = DEFAULT_BUDGET, stream: RngStream | None = None, *,
                       m: int, length: int, loops: bool = False,
                       samples: int = DEFAULT_SAMPLES) -> CondProbEstimate:
    """Probability of ``event`` over the window given ``Y(b-1) = condition``.

    Exact mode enumerates every continuation when their number is within
    ``budget`` and falls back to Monte Carlo with a warning otherwise.
    """
    if mode not in ("exact", "mc"):
        raise InvalidParameter("mode must be 'exact' or 'mc'")
    if mode == "exact":
        count = path_count(m, length, condition, loops)
        if count <= budget:
            paths = enumerate_continuations(m, length, condition, loops)
            value = float(np.mean(np.asarray(event(paths), dtype=bool)))
            return CondProbEstimate(value, "exact", count, value, value)
        warnings.warn(f"{count} continuations exceed the exact budget {budget}; "
                      "using Monte Carlo", RuntimeWarning, stacklevel=2)
    if stream is None:
        raise InvalidParameter("Monte Carlo estimation needs a stream")
    if samples < 1:
        raise InvalidParameter("samples must be positive")
    paths = sample_continuations(m, length, condition, samples, stream, loops)
    hits = int(np.count_nonzero(np.asarray(event(paths), dtype=bool)))
    lo, hi = wilson_interval(hits, samples)
    return CondProbEstimate(hits / samples, "monte-carlo", samples, lo, hi)


@lru_cache(maxsize=256)
def _colorset_table(m: int, length: int, s: int | None, loops: bool) -> tuple:
    paths = enumerate_continuations(m, length, s, loops)
    masks = np.bitwise_or.reduce(np.left_shift(1, paths), axis=1)
    values, counts = np.unique(masks, return_counts=True)
    return tuple(int(v) for v in values), tuple(float(c) / len(paths) for c in counts)


def colorset_distribution(m: int, length: int, s: int | None,
                          loops: bool = False) -> dict[int, float]:
    """Exact law of the set of colors visited by the window, as bit masks (bit c)."""
    values, probs = _colorset_table(m, length, s, loops)
    return dict(zip(values, probs))


def _key_index(key) -> int:
    digest = hashlib.blake2b(repr(key).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


@dataclass
class Estimator:
    """Estimation policy shared by the detectors.

    Monte Carlo streams are derived from ``(master_seed, key)`` where the key
    names the object being decided, so verdicts do not depend on call order.
    """

    mode: str = "exact"
    budget: int = DEFAULT_BUDGET
    samples: int = DEFAULT_SAMPLES
    master_seed: int = 0
    calls: int = field(default=0, init=False)

    def __post_init__(self):
        if self.mode not in ("exact", "mc"):
            raise InvalidParameter("estimator mode must be 'exact' or 'mc'")

    def stream_for(self, key) -> RngStream:
        return RngStream(self.master_seed, _key_index(key))

    def estimate(self, event, condition, *, m: int, length: int, loops: bool = False,
                 key=None) -> CondProbEstimate:
        self.calls += 1
        stream = self.stream_for((key, condition))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return estimate_cond_prob(event, condition, self.mode, self.budget, stream,
                                      m=m, length=length, loops=loops, samples=self.samples)

    def sup_prob(self, event, *, m: int, length: int, loops: bool = False, initial: bool = False,
                 key=None) -> float:
        """Maximum over the conditioning color (or the initial law)."""
        conds = [None] if initial else range(1, m + 1)
        return max(self.estimate(event, s, m=m, length=length, loops=loops, key=key).value
                   for s in conds)

    def exact_possible(self, m: int, length: int, loops: bool = False) -> bool:
        return self.mode == "exact" and path_count(m, length, 1, loops) <= self.budget
