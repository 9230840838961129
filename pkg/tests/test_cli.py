from __future__ import annotations

import pytest

from demon_lab.cli import run_cli


def _run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_params_level_one(capsys):
    code, out, err = _run(capsys, "params", "--r0", "4", "--level", "1")
    assert code == 0
    values = dict(line.split("=", 1) for line in out.splitlines())
    assert values["R"] == "7" and values["k"] == "1"
    assert err.startswith("# demon-lab params")


def test_check_inequalities_default_exponents(capsys):
    code, out, _ = _run(capsys, "check-inequalities")
    assert code == 0
    assert out.strip() and all(line.startswith("PASS") for line in out.splitlines())


def test_two_colors_never_escape(capsys):
    code, out, _ = _run(capsys, "simulate", "--m", "2", "--n", "2", "--trials", "100",
                        "--seed", "1")
    assert code == 0
    header, row = out.strip().splitlines()
    fields = dict(zip(header.split(","), row.split(",")))
    assert fields["successes"] == "0" and fields["estimate"] == "0"


def test_simulate_is_deterministic(capsys):
    a = _run(capsys, "simulate", "--m", "4", "--n-list", "10,20", "--trials", "50", "--seed", "9")
    b = _run(capsys, "simulate", "--m", "4", "--n-list", "10,20", "--trials", "50", "--seed", "9")
    assert a[1] == b[1] and len(a[1].splitlines()) == 3


@pytest.mark.parametrize("argv", [
    ["simulate", "--bogus", "1"],
    ["simulate", "--m", "1"],
    ["simulate", "--trials", "0"],
    ["binary", "--p", "x,y"],
    ["params", "--level", "0"],
    ["nosuchcommand"],
])
def test_bad_input_exits_one(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 1
    assert "demon-lab" in err


def test_unwritable_output_exits_one(capsys, tmp_path):
    code, _, _ = _run(capsys, "params", "--out", str(tmp_path / "missing" / "x.txt"))
    assert code == 1


def test_config_file_and_flag_precedence(capsys, tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("m = 2\ntrials = 40\nseed = 5\n")
    code, out, err = _run(capsys, "simulate", "--config", str(conf), "--n", "3")
    assert code == 0
    assert "m=2" in err and "trials=40" in err and "seed=5" in err and "n=3" in err
    code, _, err = _run(capsys, "simulate", "--config", str(conf), "--n", "3", "--m", "3")
    assert "m=3" in err


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("DEMON_LAB_SEED", "77")
    _, _, err = _run(capsys, "schedule", "--m", "4", "--n", "5")
    assert "seed=77" in err
    monkeypatch.setenv("DEMON_LAB_SEED", "nope")
    code, _, _ = _run(capsys, "schedule", "--m", "4", "--n", "5")
    assert code == 1


def test_schedule_round_trip(capsys, tmp_path):
    path = tmp_path / "sched.txt"
    code, _, _ = _run(capsys, "schedule", "--m", "5", "--n", "40", "--seed", "3",
                      "--out", str(path))
    assert code == 0 and path.read_text().strip()
    code, _, err = _run(capsys, "verify", "--m", "5", "--n", "40", "--seed", "3", str(path))
    assert code == 0 and "PASS" in err
    code, _, err = _run(capsys, "verify", "--m", "5", "--n", "40", "--seed", "4", str(path))
    assert code == 1 and "FAIL" in err


def test_scaleup_dump_verifies_and_detects_tampering(capsys, tmp_path):
    path = tmp_path / "m2.txt"
    code, _, err = _run(capsys, "scaleup", "--m", "3", "--window", "300", "--seed", "2",
                        "--out", str(path))
    assert code == 0 and "level 2 conditions: PASS" in err
    code, _, err = _run(capsys, "verify", str(path))
    assert code == 0, err
    text = path.read_text().replace("level 2", "level 2\nwall vertical 0 500 49.0 emerging-1", 1)
    path.write_text(text)
    code, _, err = _run(capsys, "verify", str(path))
    assert code == 1


def test_verify_missing_file(capsys, tmp_path):
    code, _, _ = _run(capsys, "verify", str(tmp_path / "none.txt"))
    assert code == 1


def test_diagnostics_reports_each_level(capsys):
    code, out, _ = _run(capsys, "diagnostics", "--m", "5", "--window", "200", "--seed", "1")
    assert code == 0
    assert "level 1 probability diagnostics" in out and "level 2 probability diagnostics" in out
