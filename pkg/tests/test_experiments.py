from __future__ import annotations

import numpy as np
import pytest

from demon_lab.exceptions import InsufficientData, InvalidParameter
from demon_lab.experiments import (
    CSV_HEADER,
    CurvePoint,
    blocking_curve,
    compare_fits,
    curve_from_instances,
    exponential_fit,
    first_blocking_mass,
    format_csv,
    format_fit_report,
    read_csv,
    sweep,
    tail_fit,
    wilson_interval,
    write_csv,
)
from demon_lab.percolation import escape_record
from demon_lab.rng import RngStream
from demon_lab.walks import gen_walk


def test_m2_never_escapes_square_of_side_two():
    (pt,) = blocking_curve(2, [2], 200, master_seed=5)
    assert pt.escapes == 0 and pt.p_escape == 0


def test_disjoint_instances_always_escape():
    x = np.tile([1, 2], 20)
    y = np.tile([3, 4], 20)
    curve = curve_from_instances([(x, y)] * 5, [1, 10, 30])
    assert all(pt.p_escape == 1.0 for pt in curve)


def test_curve_matches_direct_evaluation():
    seed, trials, n_list = 9, 37, [3, 8, 20]
    curve = blocking_curve(4, n_list, trials, seed)
    counts = {n: 0 for n in n_list}
    for k in range(trials):
        s = RngStream(seed, k)
        x = gen_walk(4, 21, False, s)
        y = gen_walk(4, 21, False, s)
        rec = escape_record(x, y, 20)
        for n in n_list:
            counts[n] += rec.escape(n)
    assert [pt.escapes for pt in curve] == [counts[n] for n in n_list]


def test_curve_is_monotone_and_chunk_independent(monkeypatch):
    a = blocking_curve(4, list(range(1, 31)), 300, 1)
    import demon_lab.experiments as ex
    monkeypatch.setattr(ex, "CHUNK", 7)
    b = blocking_curve(4, list(range(1, 31)), 300, 1)
    assert [p.escapes for p in a] == [p.escapes for p in b]
    esc = [p.escapes for p in a]
    assert all(u >= v for u, v in zip(esc, esc[1:]))


def test_parallel_equals_serial():
    a = blocking_curve(5, [10, 40], 4100, 3, threads=1)
    b = blocking_curve(5, [10, 40], 4100, 3, threads=3)
    assert [p.escapes for p in a] == [p.escapes for p in b]


def test_time_limit_flags_partial():
    pts = blocking_curve(5, [10], 5000, 3, time_limit=0.0)
    assert pts[0].partial and pts[0].trials < 5000


def test_input_validation():
    with pytest.raises(InvalidParameter):
        blocking_curve(3, [5, 2], 10, 0)
    with pytest.raises(InvalidParameter):
        blocking_curve(3, [5], 0, 0)
    with pytest.raises(InvalidParameter):
        sweep("q", [1], 10, 10, 0)
    with pytest.raises(InvalidParameter):
        CurvePoint(3, 5, 10, 11)


def test_binary_sweep_extremes():
    pts = sweep("p", [0.0, 1.0], 50, 40, 0)
    assert pts[0].p_escape == 1.0 and pts[1].p_escape == 0.0


def test_binary_sweep_coupled_monotone():
    pts = sweep("p", [0.1, 0.2, 0.3, 0.4], 200, 200, 11)
    est = [p.escapes for p in pts]
    assert all(u >= v for u, v in zip(est, est[1:]))


def test_m_sweep():
    pts = sweep("m", [2, 6], 20, 50, 0)
    assert pts[0].escapes == 0 and pts[1].escapes > 0


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0.03 < hi < 0.04
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and abs((0.5 - lo) - (hi - 0.5)) < 1e-12


def test_power_law_fit_exact():
    ns = np.arange(1, 200)
    fit = tail_fit(ns, ns ** -2.0)
    assert abs(fit.exponent + 2.0) < 1e-6 and fit.r_squared >= 1 - 1e-9


def test_exponential_data_prefers_exponential():
    ns = np.arange(1, 40)
    cmp = compare_fits(ns, 2.0 ** -ns)
    assert cmp.exponential.r_squared > cmp.power.r_squared + 0.05
    assert abs(cmp.exponential.exponent + np.log(2)) < 1e-9
    assert cmp.preferred == "exponential"
    report = format_fit_report(cmp, m=5)
    assert "power_r_squared=" in report and "exponential_r_squared=" in report
    assert report.splitlines()[0] == "m=5"


def test_fit_needs_three_points():
    with pytest.raises(InsufficientData):
        tail_fit([1, 2, 3], [0.1, 0.0, 0.2])
    with pytest.raises(InsufficientData):
        exponential_fit([1, 2], [0.1, 0.2])


def test_first_blocking_mass():
    curve = [CurvePoint(3, n, 10, e) for n, e in zip((1, 2, 3), (8, 5, 5))]
    ns, qs = first_blocking_mass(curve)
    assert list(ns) == [1, 2, 3] and np.allclose(qs, [0.2, 0.3, 0.0])
    with pytest.raises(InvalidParameter):
        first_blocking_mass([CurvePoint(3, 1, 10, 8), CurvePoint(3, 4, 10, 2)])


def test_csv_schema_and_round_trip(tmp_path):
    pts = blocking_curve(3, [2, 4], 30, 8) + sweep("p", [0.25], 10, 30, 8)
    text = format_csv(pts)
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert text.splitlines()[1].startswith("escape,3,2,30,")
    assert text.splitlines()[3].startswith("binary,0.25,10,30,")
    path = tmp_path / "out.csv"
    write_csv(pts, path)
    back = read_csv(path)
    assert [(p.kind, p.n, p.escapes) for p in back] == [(p.kind, p.n, p.escapes) for p in pts]


def test_csv_deterministic():
    a = format_csv(blocking_curve(4, [5, 9], 60, 21) + sweep("p", [0.3], 30, 60, 21))
    b = format_csv(blocking_curve(4, [5, 9], 60, 21) + sweep("p", [0.3], 30, 60, 21))
    assert a == b
