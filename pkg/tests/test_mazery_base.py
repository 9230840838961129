from __future__ import annotations

import itertools
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from demon_lab.exceptions import InvalidParameter
from demon_lab.mazery import (
    Direction,
    Interval,
    Trap,
    TrapKind,
    WallValue,
    base_mazery,
    colorset_distribution,
    detect_uncorrelated,
    estimate_cond_prob,
    find_hole,
    iter_holes,
)
from demon_lab.mazery.cleanness import Rect, scale_cleanness
from demon_lab.mazery.estimator import enumerate_continuations, path_count
from demon_lab.mazery.structure import ExplicitTraps, base_params
from demon_lab.rng import RngStream
from demon_lab.walks import gen_walk

H, V = Direction.HORIZONTAL, Direction.VERTICAL


# ---------------------------------------------------------------- base structure

def test_base_traps_are_equal_colors():
    M = base_mazery([1, 2], [2, 1], 2, w=0.6, m=3)
    assert {t.start for t in M.all_traps()} == {(0, 1), (1, 0)}
    assert all(t.size == 0 and t.kind is TrapKind.BASE for t in M.all_traps())


def test_disjoint_colors_have_no_traps():
    M = base_mazery([1, 2, 1, 2], [3, 4, 3, 4], 4, w=0.5, m=4)
    assert M.all_traps() == []
    assert M.walls[V] == [] and M.barriers[H] == []


def test_base_trap_density_near_one_over_m():
    m, n = 5, 10_000
    s = RngStream(3, 0)
    x = gen_walk(m, n, False, s).values
    y = gen_walk(m, n, False, s).values
    # closed points are pairs of equal colors: sum over colors of the count products
    cx = np.bincount(x, minlength=m + 1)
    cy = np.bincount(y, minlength=m + 1)
    density = float(np.dot(cx, cy)) / n**2
    se = np.sqrt(0.2 * 0.8 / n**2)
    assert abs(density - 0.2) <= 3 * se
    M = base_mazery(x, y, n, w=0.3, m=m)
    block = M.traps.closed_grid(0, 99, 0, 99)
    assert block.sum() == sum(int(x[i] == y[j]) for i in range(100) for j in range(100))


@pytest.mark.parametrize("w", [0.25, 1.0, 0.1])
def test_w_out_of_range(w):
    with pytest.raises(InvalidParameter):
        base_mazery([1, 2, 3], [3, 2, 1], 3, w=w, m=5)


def test_window_must_fit():
    with pytest.raises(InvalidParameter):
        base_mazery([1, 2], [2, 1], 5, w=0.6, m=3)


# ---------------------------------------------------------------- uncorrelated traps

def test_uncorrelated_pair_box():
    # closed points exactly (0, 0) and (2, 3)
    M = base_mazery([1, 5, 2, 6], [1, 7, 8, 2], 4, w=0.5, m=8)
    assert {t.start for t in M.all_traps()} == {(0, 0), (2, 3)}
    assert detect_uncorrelated(M) == [Trap(0, 2, 0, 3, TrapKind.UNCORRELATED)]


def test_single_trap_gives_no_uncorrelated():
    M = base_mazery([1, 2, 3], [4, 1, 5], 3, w=0.5, m=6)
    assert len(M.all_traps()) == 1
    assert detect_uncorrelated(M) == []


def test_far_pair_gives_no_uncorrelated():
    M = base_mazery(np.arange(1, 11), np.arange(1, 11), 10, w=0.5, m=10)
    M = replace(M, traps=ExplicitTraps([Trap(0, 0, 0, 0), Trap(9, 9, 9, 9)]))
    assert detect_uncorrelated(M) == []


def _brute_pairs(points, f):
    out = set()
    for (i1, j1), (i2, j2) in itertools.combinations(points, 2):
        if i1 != i2 and j1 != j2 and max(abs(i1 - i2), abs(j1 - j2)) <= f:
            out.add((min(i1, i2), max(i1, i2), min(j1, j2), max(j1, j2)))
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(3, 5), st.integers(2, 6))
def test_uncorrelated_matches_brute_force(seed, m, f):
    s = RngStream(seed, 0)
    x = gen_walk(m, 14, False, s).values
    y = gen_walk(m, 14, False, s).values
    M = base_mazery(x, y, 14, w=0.9, m=m, params=base_params(0.9, f=f, g=2))
    pts = [(i, j) for i in range(14) for j in range(14) if x[i] == y[j]]
    expect = _brute_pairs(pts, f)
    got = {(t.x0, t.x1, t.y0, t.y1) for t in detect_uncorrelated(M)}
    assert got == expect
    # the generic path over an explicit trap list agrees
    Me = replace(M, traps=ExplicitTraps([Trap(i, i, j, j) for i, j in pts]))
    assert {(t.x0, t.x1, t.y0, t.y1) for t in detect_uncorrelated(Me)} == expect


# ---------------------------------------------------------------- holes

def _hwall(a, b, rank=10.0):
    return WallValue(Interval(a, b), rank, H, "wall", "emerging-1")


def test_open_strip_hole_at_left_edge():
    # wall rows 2..4 carry colors 1, 2; the columns use 3, 4 only
    x = [3, 4] * 6
    y = [5, 6, 1, 2, 1, 6, 5, 6, 5, 6, 5, 6]
    M = base_mazery(x, y, 12, w=0.5, m=6)
    wall = _hwall(2, 4)
    hole = find_hole(M, wall, Interval(3, 9))
    assert hole is not None and hole.interval == Interval(3, 4) and hole.good


def test_staircase_is_the_only_crossing():
    # Y(1..3) = 1, 2, 3; column 4 blocks row 3 only, column 5 blocks row 1 only
    x = [5, 1, 1, 1, 3, 1, 1, 1]
    y = [4, 1, 2, 3, 4, 4, 4, 4]
    M = base_mazery(x, y, 8, w=0.5, m=5)
    wall = _hwall(1, 3)
    holes = list(iter_holes(M, wall, Interval(-1, 7)))
    assert [h.interval for h in holes] == [Interval(3, 5)]
    x2 = list(x)
    x2[5] = 2  # close (5, 2): the staircase is cut
    M2 = base_mazery(x2, y, 8, w=0.5, m=5)
    assert find_hole(M2, wall, Interval(-1, 7)) is None


def _crossing_oracle(x, y, d, t, a1, b1):
    """Up-right path from (d, a1) to (t, b1) through open points of (d, t] x [a1, b1]."""
    reach = {(d, a1)}
    for i in range(d, t + 1):
        for j in range(a1, b1 + 1):
            if (i, j) == (d, a1) or i == d:
                continue
            if x[i] == y[j]:
                continue
            if (i - 1, j) in reach or (i, j - 1) in reach:
                reach.add((i, j))
    return (t, b1) in reach


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 4))
def test_holes_match_path_oracle(seed, size):
    s = RngStream(seed, 1)
    x = gen_walk(3, 20, False, s).values
    y = gen_walk(3, 20, False, s).values
    M = base_mazery(x, y, 20, w=0.9, m=3)
    a1 = 5
    wall = WallValue(Interval(a1, a1 + size), 10.0, H, "wall", "emerging-1")
    got = {(h.interval.a, h.interval.b) for h in iter_holes(M, wall, Interval(2, 16))}
    expect = {(d, t) for d in range(2, 16) for t in range(d + 1, min(d + size, 16) + 1)
              if _crossing_oracle(x, y, d, t, a1, a1 + size)}
    assert got == expect


# ---------------------------------------------------------------- estimator

def test_impossible_event_has_probability_zero():
    never = lambda paths: np.zeros(len(paths), dtype=bool)  # noqa: E731
    assert estimate_cond_prob(never, 1, m=3, length=4).value == 0.0
    mc = estimate_cond_prob(never, 1, "mc", stream=RngStream(0, 0), m=3, length=4, samples=500)
    assert mc.value == 0.0 and mc.mode == "monte-carlo"


def test_next_color_probability_half():
    est = estimate_cond_prob(lambda p: p[:, 0] == 1, 2, m=3, length=1)
    assert est.value == 0.5 and est.mode == "exact" and est.samples == 2


def test_path_counts():
    assert path_count(4, 3, 2) == 27
    assert path_count(4, 3, None) == 4 * 9
    assert path_count(4, 3, 2, loops=True) == 64
    paths = enumerate_continuations(3, 2, 1)
    assert sorted(map(tuple, paths)) == [(2, 1), (2, 3), (3, 1), (3, 2)]


def _enum_colorsets(m, length, s, loops):
    counts = {}
    total = 0
    for path in itertools.product(range(1, m + 1), repeat=length):
        prev, ok = s, True
        for c in path:
            if not loops and prev is not None and c == prev:
                ok = False
                break
            prev = c
        if not ok:
            continue
        mask = sum(1 << c for c in set(path))
        counts[mask] = counts.get(mask, 0) + 1
        total += 1
    return {k: v / total for k, v in counts.items()}


@pytest.mark.parametrize("m,length,s,loops", [(3, 4, 1, False), (4, 3, None, False),
                                              (3, 3, 2, True), (5, 4, 5, False)])
def test_colorset_distribution_matches_enumeration(m, length, s, loops):
    got = colorset_distribution(m, length, s, loops)
    expect = _enum_colorsets(m, length, s, loops)
    assert got.keys() == expect.keys()
    for k in got:
        assert got[k] == pytest.approx(expect[k], abs=1e-12)


@pytest.mark.parametrize("k", range(6))
def test_monte_carlo_agrees_with_exact(k):
    rng = np.random.default_rng(k)
    m, length = 4, 5
    target = int(rng.integers(1, m + 1))
    cut = int(rng.integers(1, length + 1))
    event = lambda p: np.any(p[:, :cut] == target, axis=1)  # noqa: E731
    exact = estimate_cond_prob(event, 1, m=m, length=length).value
    mc = estimate_cond_prob(event, 1, "mc", stream=RngStream(k, 9), m=m, length=length,
                            samples=10_000)
    se = np.sqrt(max(exact * (1 - exact), 1e-12) / 10_000)
    assert abs(mc.value - exact) <= 4 * se + 1e-12
    assert mc.ci_low <= mc.value <= mc.ci_high


def test_exact_budget_falls_back_with_warning():
    with pytest.warns(RuntimeWarning):
        est = estimate_cond_prob(lambda p: p[:, 0] > 0, 1, "exact", budget=3,
                                 stream=RngStream(0, 0), m=4, length=3, samples=100)
    assert est.mode == "monte-carlo" and est.value == 1.0


def test_monte_carlo_needs_stream():
    with pytest.raises(InvalidParameter):
        estimate_cond_prob(lambda p: p[:, 0] > 0, 1, "mc", m=3, length=2)


# ---------------------------------------------------------------- cleanness

def test_point_near_trap_is_not_trap_clean():
    # only closed point: (2, 2)
    x = [1, 2, 3, 4, 5, 6]
    y = [7, 8, 3, 7, 8, 7]
    M = base_mazery(x, y, 6, w=0.5, m=8, params=base_params(0.5, f=5, g=5))
    C = scale_cleanness(M)
    assert not C.trap_clean("start", Rect(0, 4, 0, 4))
    assert C.trap_clean("start", Rect(0, 1, 0, 1))
    assert C.trap_clean("end", Rect(3, 5, 3, 5))
    M2 = base_mazery(x, y, 6, w=0.5, m=8, params=base_params(0.5, f=5, g=2))
    assert scale_cleanness(M2).trap_clean("start", Rect(0, 4, 0, 4))


def test_wall_end_within_a_third_of_f_is_unclean():
    M = base_mazery(np.arange(40) % 3 + 1, np.arange(40) % 3 + 1, 40, w=0.6, m=3,
                    params=base_params(0.6, f=12, g=5, Delta_star=64))
    wall = WallValue(Interval(10, 14), 30.0, V, "wall", "emerging-1")
    M = replace(M, walls={V: [wall], H: []}, barriers={V: [wall], H: []})
    C = scale_cleanness(M)
    assert not C.clean_right(V, 5, 17)   # end 14 is 3 < f/3 to the left of 17
    assert C.clean_right(V, 5, 18)       # distance 4 = f/3
    assert C.clean_right(V, 11, 17)      # wall not inside (11, 17]
    assert not C.clean_left(V, 7, 20)    # start 10 is 3 to the right of 7
    assert C.clean_right(H, 5, 17)


def test_no_walls_keeps_cleanness():
    M = base_mazery([1, 2, 3] * 10, [2, 3, 1] * 10, 30, w=0.6, m=3)
    C = scale_cleanness(M)
    for d in Direction:
        for a in range(-1, 20):
            assert C.inner_clean(d, a, a + 7) == M.cleanness.inner_clean(d, a, a + 7)
            assert C.strong_right(d, a, a + 7)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 50), st.integers(1, 6)), max_size=8),
       st.integers(-1, 60), st.integers(1, 30))
def test_strong_cleanness_implies_cleanness(bodies, a, length):
    M = base_mazery(np.arange(70) % 3 + 1, np.arange(70) % 3 + 1, 70, w=0.6, m=3,
                    params=base_params(0.6, f=12, g=5, Delta_star=64))
    ws = [WallValue(Interval(s, s + k), 30.0, V, "barrier", "emerging-1") for s, k in bodies]
    walls = [w.as_wall() for w in ws[::2]]
    M = replace(M, walls={V: walls, H: []}, barriers={V: ws, H: []})
    C = scale_cleanness(M)
    b = a + length
    if C.strong_right(V, a, b):
        assert C.clean_right(V, a, b)
    if C.strong_left(V, a, b):
        assert C.clean_left(V, a, b)
