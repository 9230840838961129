from __future__ import annotations

import itertools
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from demon_lab.exceptions import InvalidParameter
from demon_lab.percolation import (
    BELOW,
    LEFT,
    LatticePoint,
    RectKind,
    RectSpec,
    binary_compatible,
    closed_point,
    escape_record,
    reach_set,
    reachable_in_rect,
    row_fill,
)


def bfs_reach(x, y, n):
    seen = np.zeros((n + 1, n + 1), dtype=bool)
    seen[0, 0] = True
    queue = deque([(0, 0)])
    while queue:
        i, j = queue.popleft()
        for a, b in ((i + 1, j), (i, j + 1)):
            if a <= n and b <= n and not seen[a, b] and x[a] != y[b]:
                seen[a, b] = True
                queue.append((a, b))
    return seen


def bfs_rect(x, y, rect, confined):
    a, b = rect.start, rect.end
    seen = {(a.x, a.y)}
    queue = deque(seen)
    while queue:
        i, j = queue.popleft()
        for p in ((i + 1, j), (i, j + 1)):
            if p[0] > b.x or p[1] > b.y or p in seen or x[p[0]] == y[p[1]]:
                continue
            if confined and not rect.contains(LatticePoint(*p)):
                continue
            seen.add(p)
            queue.append(p)
    return (b.x, b.y) in seen


def brute_binary(z0, z1, n):
    """All ways to delete zeros, then compare the remaining prefixes."""
    z0, z1 = list(z0[:n]), list(z1[:n])

    def options(z):
        zero_pos = [k for k, v in enumerate(z) if v == 0]
        for r in range(len(zero_pos) + 1):
            for drop in itertools.combinations(zero_pos, r):
                yield tuple(v for k, v in enumerate(z) if k not in drop)

    # time columns: after deletion the survivors are paired position by position;
    # deleted zeros sit in columns of their own, which is always harmless
    for a in set(options(z0)):
        for b in set(options(z1)):
            if len(a) != len(b):
                continue
            if all(not (u == 1 and v == 1) for u, v in zip(a, b)):
                return True
    return False


def random_walk(rng, m, n):
    out = [int(rng.integers(1, m + 1))]
    for _ in range(n - 1):
        r = int(rng.integers(0, m - 1))
        out.append(r + 1 if r + 1 < out[-1] else r + 2)
    return np.array(out)


def test_row_fill_small():
    assert row_fill(0b1111, 0b0101) == 0b1111
    assert row_fill(0b1101, 0b0001) == 0b0001
    assert row_fill(0b1011, 0b1000) == 0b1000
    assert row_fill(0b0110, 0b0010) == 0b0110


def test_closed_point_examples():
    assert closed_point([1, 2], [2, 1], 0, 1) and closed_point([1, 2], [2, 1], 1, 0)
    assert not any(closed_point([1, 2], [3, 4], i, j) for i in range(2) for j in range(2))
    x, y = [1, 2, 1], [1, 3, 1]
    assert closed_point(x, y, 0, 0) and closed_point(x, y, 2, 2)
    assert not closed_point(x, y, 1, 1)
    with pytest.raises(InvalidParameter):
        closed_point(x, y, 3, 0)


def test_two_traps_block_diagonal():
    rs = reach_set([1, 2], [2, 1], 1)
    assert rs.reach[0, 0] and not rs.reach[1, 1]
    rect = RectSpec(LatticePoint(0, 0), LatticePoint(1, 1))
    assert not reachable_in_rect([1, 2], [2, 1], rect, confined=True)


def test_disjoint_colors_reach_everything():
    x = np.tile([1, 2], 9)[:17]
    y = np.tile([3, 4], 9)[:17]
    assert reach_set(x, y, 16).reach.all()
    assert all(escape_record(x, y, 16).escape_flags)


def test_reach_needs_long_enough_sequences():
    with pytest.raises(InvalidParameter):
        reach_set([1, 2], [2, 1], 2)


def test_reach_matches_bfs_oracle(rng):
    for _ in range(500):
        m = int(rng.integers(2, 7))
        n = int(rng.integers(1, 65))
        x, y = random_walk(rng, m, n + 1), random_walk(rng, m, n + 1)
        rs = reach_set(x, y, n)
        assert np.array_equal(rs.reach, bfs_reach(x, y, n))


def test_witness_soundness(rng):
    for _ in range(100):
        m = int(rng.integers(2, 6))
        n = int(rng.integers(1, 40))
        x, y = random_walk(rng, m, n + 1), random_walk(rng, m, n + 1)
        rs = reach_set(x, y, n)
        for i, j in zip(*np.nonzero(rs.reach)):
            if (i, j) == (0, 0):
                continue
            assert x[i] != y[j]
            if rs.witness[i, j] == LEFT:
                assert rs.reach[i - 1, j]
            else:
                assert rs.witness[i, j] == BELOW and rs.reach[i, j - 1]


def test_escape_m2_exhaustive():
    for a, b in itertools.product((1, 2), repeat=2):
        x = [a if k % 2 == 0 else 3 - a for k in range(5)]
        y = [b if k % 2 == 0 else 3 - b for k in range(5)]
        rec = escape_record(x, y, 4)
        if a != b:
            assert not rec.escape(1)
        else:
            assert rec.escape(1) and not rec.escape(2)
        assert not rec.escape(2)


def test_escape_matches_bfs_and_is_monotone(rng):
    for _ in range(200):
        m = int(rng.integers(2, 6))
        n = int(rng.integers(1, 50))
        x, y = random_walk(rng, m, n + 1), random_walk(rng, m, n + 1)
        rec = escape_record(x, y, n)
        seen = bfs_reach(x, y, n)
        for k in range(1, n + 1):
            box = seen[:k + 1, :k + 1]
            assert rec.escape(k) == bool(box[k, :].any() or box[:, k].any())
        flags = rec.escape_flags
        assert all(not flags[k + 1] or flags[k] for k in range(len(flags) - 1))


def test_rect_start_equals_end(rng):
    x, y = random_walk(rng, 3, 10), random_walk(rng, 3, 10)
    p = LatticePoint(4, 5)
    for kind in RectKind:
        assert reachable_in_rect(x, y, RectSpec(p, p, kind))


def test_rect_matches_bfs_and_relaxation(rng):
    for _ in range(300):
        m = int(rng.integers(2, 6))
        x, y = random_walk(rng, m, 14), random_walk(rng, m, 14)
        a0, a1 = int(rng.integers(0, 10)), int(rng.integers(0, 10))
        b0, b1 = int(rng.integers(a0, 14)), int(rng.integers(a1, 14))
        kind = list(RectKind)[int(rng.integers(0, 3))]
        rect = RectSpec(LatticePoint(a0, a1), LatticePoint(b0, b1), kind)
        conf = reachable_in_rect(x, y, rect, confined=True)
        free = reachable_in_rect(x, y, rect, confined=False)
        assert conf == bfs_rect(x, y, rect, True)
        assert free == bfs_rect(x, y, rect, False)
        assert not conf or free


def test_rect_validation():
    with pytest.raises(InvalidParameter):
        RectSpec(LatticePoint(3, 0), LatticePoint(1, 2))


def test_binary_examples():
    assert not binary_compatible([1], [1], 1)
    assert binary_compatible([1, 0], [0, 1], 2)
    with pytest.raises(InvalidParameter):
        binary_compatible([1], [0, 0], 2)


def test_binary_exhaustive_small():
    for n in range(1, 5):
        for bits in itertools.product((0, 1), repeat=2 * n):
            z0, z1 = bits[:n], bits[n:]
            assert binary_compatible(z0, z1, n) == brute_binary(z0, z1, n), (z0, z1)


def test_binary_sampled_lengths_5_6(rng):
    for _ in range(1000):
        n = int(rng.integers(5, 7))
        z0 = rng.integers(0, 2, n)
        z1 = rng.integers(0, 2, n)
        assert binary_compatible(z0, z1, n) == brute_binary(z0, z1, n)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=30), st.data())
def test_binary_zero_padding_never_hurts(z0, data):
    n = len(z0)
    z1 = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    if binary_compatible(z0, z1, n):
        # a sequence of zeros is compatible with anything
        assert binary_compatible([0] * n, z1, n)
