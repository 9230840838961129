"""Deterministic SplitMix64 streams.

A stream is identified by ``(master_seed, stream_index)``. Its initial state is
one SplitMix64 output of the master sequence at position ``stream_index`` and
draws then advance by the golden-ratio increment. Distinct indices therefore
start at unrelated points of the 2**64 cycle instead of being shifted copies of
each other.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 output function applied to a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def stream_state(master_seed: int, stream_index: int) -> int:
    if master_seed < 0 or stream_index < 0:
        raise ValueError("seed and stream index must be nonnegative")
    return mix64((master_seed + stream_index * GOLDEN) & MASK64)


def draw_block(states: np.ndarray, start: int, count: int) -> np.ndarray:
    """Draws ``start+1 .. start+count`` of every stream in ``states``.

    Returns an array of shape ``(len(states), count)``; row ``k`` equals the
    sequence ``RngStream`` would produce after skipping ``start`` draws.
    """
    states = np.asarray(states, dtype=np.uint64).reshape(-1, 1)
    steps = np.arange(start + 1, start + count + 1, dtype=np.uint64) * np.uint64(GOLDEN)
    with np.errstate(over="ignore"):
        return mix64_array(states + steps[None, :])


def rejection_limit(k: int) -> int:
    """Largest accepted draw + 1 when reducing a 64-bit word modulo ``k``."""
    return (1 << 64) - ((1 << 64) % k)


class RngStream:
    """A reproducible stream of 64-bit draws.

    The draw sequence is a pure function of ``(master_seed, stream_index)``;
    ``position`` counts draws consumed so far.
    """

    __slots__ = ("master_seed", "stream_index", "_state", "position")

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.master_seed = int(master_seed) & MASK64
        self.stream_index = int(stream_index)
        self._state = stream_state(self.master_seed, self.stream_index)
        self.position = 0

    def __repr__(self):
        return (f"RngStream(master_seed={self.master_seed}, "
                f"stream_index={self.stream_index}, position={self.position})")

    def spawn(self, index: int) -> "RngStream":
        """Independent child stream keyed by this stream's identity and ``index``."""
        return RngStream(mix64(self._state ^ mix64(index + 1)), 0)

    def next_u64(self) -> int:
        self.position += 1
        return mix64(self._state + self.position * GOLDEN)

    def draws(self, count: int) -> np.ndarray:
        out = draw_block(np.array([self._state], dtype=np.uint64), self.position, count)[0]
        self.position += count
        return out

    def uniform_int(self, k: int) -> int:
        """Uniform integer in ``[0, k)`` by rejection sampling."""
        if k < 1:
            raise ValueError("k must be positive")
        limit = rejection_limit(k)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % k

    def uniform_float(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits of one draw."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))
