"""Source processes: random walks on K_m and Bernoulli bit sequences."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidParameter
from .rng import RngStream, draw_block, rejection_limit

__all__ = [
    "ColorSequence",
    "BitSequence",
    "gen_walk",
    "gen_bernoulli",
    "walk_batch",
    "bernoulli_batch",
]


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    if arr.ndim != 1:
        raise InvalidParameter("sequence values must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ColorSequence:
    """A finite realization of one walk on colors ``1..m`` (index origin 0)."""

    m: int
    loops: bool
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = _frozen_array(self.values, np.int64)
        object.__setattr__(self, "values", vals)
        if self.m < 1 or (not self.loops and self.m < 2):
            raise InvalidParameter(f"invalid color count m={self.m}")
        if vals.size and (vals.min() < 1 or vals.max() > self.m):
            raise InvalidParameter("color values must lie in 1..m")
        if not self.loops and vals.size > 1 and np.any(vals[1:] == vals[:-1]):
            raise InvalidParameter("a walk without loops cannot repeat a color")

    def __len__(self):
        return int(self.values.size)

    def __getitem__(self, i):
        return self.values[i]

    def __eq__(self, other):
        if not isinstance(other, ColorSequence):
            return NotImplemented
        return (self.m == other.m and self.loops == other.loops
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.m, self.loops, self.values.tobytes()))


@dataclass(frozen=True, eq=False)
class BitSequence:
    p: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = _frozen_array(self.values, np.uint8)
        object.__setattr__(self, "values", vals)
        if vals.size and vals.max() > 1:
            raise InvalidParameter("bit values must be 0 or 1")

    def __len__(self):
        return int(self.values.size)

    def __getitem__(self, i):
        return self.values[i]

    def __eq__(self, other):
        if not isinstance(other, BitSequence):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.p, self.values.tobytes()))


def _check_walk_args(m: int, n: int, loops: bool):
    if n < 1:
        raise InvalidParameter("walk length must be at least 1")
    if loops and m < 1:
        raise InvalidParameter("need m >= 1")
    if not loops and m < 2:
        raise InvalidParameter("a walk without loops needs m >= 2")


def _walk_from_draws(m: int, loops: bool, draws) -> list[int]:
    """Map accepted draws to colors. ``draws[0]`` picks the start."""
    out = [int(draws[0]) % m + 1]
    cur = out[0]
    if loops:
        for u in draws[1:]:
            cur = int(u) % m + 1
            out.append(cur)
    else:
        k = m - 1
        for u in draws[1:]:
            r = int(u) % k
            cur = r + 1 if r + 1 < cur else r + 2
            out.append(cur)
    return out


def gen_walk(m: int, n: int, loops: bool, stream: RngStream) -> ColorSequence:
    """Walk of length ``n`` on ``K_m`` (with self-loops when ``loops``).

    The start is uniform on ``1..m``; each later value is uniform over the other
    ``m-1`` colors, or over all ``m`` colors when loops are allowed.
    """
    _check_walk_args(m, n, loops)
    step_k = m if loops else m - 1
    start_limit = rejection_limit(m)
    step_limit = rejection_limit(step_k)
    pos = stream.position
    block = stream.draws(n)
    accepted = int(block[0]) < start_limit and (
        n == 1 or bool(np.all(block[1:] < np.uint64(step_limit)))
        if step_limit < (1 << 64) else True)
    if accepted:
        return ColorSequence(m, loops, _walk_from_draws(m, loops, block))
    # rare path: some draw was rejected; replay one draw at a time
    stream.position = pos
    out = [stream.uniform_int(m) + 1]
    cur = out[0]
    for _ in range(n - 1):
        if loops:
            cur = stream.uniform_int(m) + 1
        else:
            r = stream.uniform_int(m - 1)
            cur = r + 1 if r + 1 < cur else r + 2
        out.append(cur)
    return ColorSequence(m, loops, out)


def _bernoulli_threshold(p: float):
    if not (0.0 <= p <= 1.0):
        raise InvalidParameter(f"p={p} outside [0, 1]")
    if p == 1.0:
        return None
    return int(p * 2.0 ** 64)


def gen_bernoulli(p: float, n: int, stream: RngStream) -> BitSequence:
    """``n`` independent bits with ``P(1) = p``: bit is 1 iff draw < floor(p 2**64)."""
    threshold = _bernoulli_threshold(p)
    if n < 1:
        raise InvalidParameter("sequence length must be at least 1")
    block = stream.draws(n)
    if threshold is None:
        bits = np.ones(n, dtype=np.uint8)
    else:
        bits = (block < np.uint64(threshold)).astype(np.uint8)
    return BitSequence(p, bits)


def walk_batch(m: int, n: int, loops: bool, streams: list[RngStream]) -> np.ndarray:
    """One walk of length ``n`` per stream, as an ``(len(streams), n)`` array.

    Row ``k`` is identical to ``gen_walk(m, n, loops, streams[k]).values`` and
    every stream is advanced exactly as ``gen_walk`` would advance it.
    """
    _check_walk_args(m, n, loops)
    if not streams:
        return np.zeros((0, n), dtype=np.int64)
    states = np.array([s._state for s in streams], dtype=np.uint64)
    positions = {s.position for s in streams}
    if len(positions) != 1:
        return np.stack([gen_walk(m, n, loops, s).values for s in streams])
    pos = positions.pop()
    block = draw_block(states, pos, n)
    step_k = m if loops else m - 1
    ok = block[:, 0] < np.uint64(rejection_limit(m)) if rejection_limit(m) < (1 << 64) \
        else np.ones(len(streams), dtype=bool)
    if n > 1 and rejection_limit(step_k) < (1 << 64):
        ok &= np.all(block[:, 1:] < np.uint64(rejection_limit(step_k)), axis=1)
    out = np.empty((len(streams), n), dtype=np.int64)
    out[:, 0] = (block[:, 0] % np.uint64(m)).astype(np.int64) + 1
    if loops:
        out[:, 1:] = (block[:, 1:] % np.uint64(m)).astype(np.int64) + 1
    else:
        r = (block[:, 1:] % np.uint64(m - 1)).astype(np.int64)
        cur = out[:, 0].copy()
        for t in range(1, n):
            rt = r[:, t - 1]
            cur = np.where(rt + 1 < cur, rt + 1, rt + 2)
            out[:, t] = cur
    for s in streams:
        s.position = pos + n
    for k in np.flatnonzero(~ok):
        streams[k].position = pos
        out[k] = gen_walk(m, n, loops, streams[k]).values
    return out


def bernoulli_batch(p: float, n: int, streams: list[RngStream]) -> np.ndarray:
    """Batch counterpart of ``gen_bernoulli``; rows are uint8 bit vectors."""
    threshold = _bernoulli_threshold(p)
    if n < 1:
        raise InvalidParameter("sequence length must be at least 1")
    positions = {s.position for s in streams}
    if len(positions) != 1:
        return np.stack([gen_bernoulli(p, n, s).values for s in streams])
    pos = positions.pop()
    states = np.array([s._state for s in streams], dtype=np.uint64)
    block = draw_block(states, pos, n)
    for s in streams:
        s.position = pos + n
    if threshold is None:
        return np.ones((len(streams), n), dtype=np.uint8)
    return (block < np.uint64(threshold)).astype(np.uint8)
