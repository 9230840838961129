"""``demon-lab`` command line: simulations, schedules, toy mazeries and parameters.

Exit status is 0 on success, 1 on a validation error (bad flag, bad value,
failed check) and 2 on a runtime failure. Messages go to standard error;
data goes to standard output or to ``--out``.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .exceptions import InvalidParameter, ParameterRangeError
from .experiments import blocking_curve, format_csv, sweep
from .params import (ExponentSet, check_inequalities, exponents_from_config, level_params,
                     load_config)
from .rng import RngStream
from .scheduling import (extract_schedule, format_schedule, read_schedule, verify_no_collision)
from .walks import gen_walk

__all__ = ["RunConfig", "build_parser", "run_cli", "main"]

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

# flag name -> (type, default); None defaults mean "not applicable unless given"
FLAGS = {
    "m": (int, 5),
    "p": (str, "0.1,0.2,0.3,0.4,0.5,0.6"),
    "n": (int, 200),
    "n_list": (str, None),
    "trials": (int, 1000),
    "seed": (int, None),
    "loops": (bool, False),
    "horizon": (int, 1000),
    "r0": (float, None),
    "level": (int, None),
    "out": (str, None),
    "threads": (int, None),
    "window": (int, 1200),
    "estimator": (str, "exact"),
    "mc_samples": (int, 10000),
}

COMMANDS = {
    "simulate": ("m", "n", "n_list", "trials", "seed", "loops", "threads", "out"),
    "binary": ("p", "horizon", "trials", "seed", "threads", "out"),
    "schedule": ("m", "n", "seed", "loops", "out"),
    "scaleup": ("m", "window", "seed", "loops", "level", "r0", "estimator", "mc_samples", "out"),
    "params": ("r0", "level", "out"),
    "check-inequalities": ("r0", "out"),
    "verify": ("m", "n", "seed", "loops", "estimator", "mc_samples"),
    "diagnostics": ("m", "window", "seed", "loops", "level", "r0", "estimator", "mc_samples",
                    "trials", "out"),
}


class UsageError(Exception):
    """Raised instead of argparse's own exit so the status code stays ours."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    """Effective configuration: defaults, then the config file, then flags."""

    command: str
    values: dict
    path: str | None = None
    raw_config: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def line(self) -> str:
        shown = " ".join(f"{k}={v}" for k, v in sorted(self.values.items()) if v is not None)
        return f"# demon-lab {self.command} {shown}".rstrip()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="demon-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, keys in COMMANDS.items():
        cmd = sub.add_parser(name)
        for key in keys:
            flag = "--" + key.replace("_", "-")
            kind = FLAGS[key][0]
            if kind is bool:
                cmd.add_argument(flag, action="store_const", const=True, default=None)
            elif key == "estimator":
                cmd.add_argument(flag, choices=("exact", "mc"), default=None)
            else:
                cmd.add_argument(flag, type=kind, default=None)
        cmd.add_argument("--config", default=None, metavar="PATH")
        if name == "verify":
            cmd.add_argument("path", help="schedule file or mazery dump")
    return parser


def _coerce(key: str, text: str):
    kind = FLAGS[key][0]
    if kind is bool:
        return text.strip().lower() in ("1", "true", "yes", "on")
    try:
        return kind(text)
    except ValueError:
        raise InvalidParameter(f"config value for {key} is not a {kind.__name__}: {text}") from None


def resolve(args: argparse.Namespace) -> RunConfig:
    keys = COMMANDS[args.command]
    raw = load_config(args.config) if args.config else {}
    values = {}
    for key in keys:
        value = getattr(args, key)
        if value is None:
            conf_key = next((k for k in (key, key.replace("_", "-")) if k in raw), None)
            value = _coerce(key, raw[conf_key]) if conf_key else FLAGS[key][1]
        values[key] = value
    if "seed" in values and values["seed"] is None:
        env = os.environ.get("DEMON_LAB_SEED")
        try:
            values["seed"] = int(env) if env else 0
        except ValueError:
            raise InvalidParameter(f"DEMON_LAB_SEED is not an integer: {env}") from None
    return RunConfig(args.command, values, getattr(args, "path", None), raw)


def _validate(cfg: RunConfig) -> None:
    v = cfg.values
    for key in ("m", "n", "trials", "horizon", "window", "mc_samples"):
        if key in v and v[key] is not None and v[key] < 1:
            raise InvalidParameter(f"--{key.replace('_', '-')} must be positive")
    if "m" in v and v["m"] < 2:
        raise InvalidParameter("--m must be at least 2")
    if v.get("threads") is not None and v["threads"] < 1:
        raise InvalidParameter("--threads must be positive")
    if v.get("level") is not None and v["level"] < 1:
        raise InvalidParameter("--level must be at least 1")
    out = v.get("out")
    if out:
        parent = Path(out).resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            raise InvalidParameter(f"output path is not writable: {out}")


def _exponents(cfg: RunConfig) -> ExponentSet:
    exps = exponents_from_config(cfg.raw_config)
    if cfg.values.get("r0") is not None:
        exps = exps.replace(R0=cfg.values["r0"])
    return exps


def _emit(cfg: RunConfig, text: str) -> None:
    out = cfg.values.get("out")
    if out:
        Path(out).write_text(text)
        print(f"wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _n_list(cfg: RunConfig) -> list[int]:
    text = cfg["n_list"]
    if not text:
        return [cfg["n"]]
    try:
        return [int(part) for part in str(text).split(",") if part.strip()]
    except ValueError:
        raise InvalidParameter(f"--n-list must be a comma list of integers: {text}") from None


def _p_values(cfg: RunConfig) -> list[float]:
    try:
        return [float(part) for part in str(cfg["p"]).split(",") if part.strip()]
    except ValueError:
        raise InvalidParameter(f"--p must be a number or comma list: {cfg['p']}") from None


def _walk_pair(cfg: RunConfig, n: int):
    stream = RngStream(cfg["seed"], 0)
    x = gen_walk(cfg["m"], n + 1, cfg["loops"], stream)
    y = gen_walk(cfg["m"], n + 1, cfg["loops"], stream)
    return x, y


# subcommands -------------------------------------------------------------

def cmd_simulate(cfg):
    points = blocking_curve(cfg["m"], _n_list(cfg), cfg["trials"], cfg["seed"], cfg["loops"],
                            threads=cfg["threads"])
    _emit(cfg, format_csv(points))
    return EXIT_OK


def cmd_binary(cfg):
    points = sweep("p", _p_values(cfg), cfg["horizon"], cfg["trials"], cfg["seed"],
                   threads=cfg["threads"])
    _emit(cfg, format_csv(points))
    return EXIT_OK


def cmd_schedule(cfg):
    x, y = _walk_pair(cfg, cfg["n"])
    sched = extract_schedule(x, y, cfg["n"])
    if sched is None:
        print(f"blocked: no path escapes [0, {cfg['n']}]^2", file=sys.stderr)
        return EXIT_OK
    if not verify_no_collision(x, y, sched):
        print("extracted schedule failed verification", file=sys.stderr)
        return EXIT_RUNTIME
    _emit(cfg, format_schedule(sched))
    return EXIT_OK


def _estimator(cfg):
    from .mazery.estimator import Estimator

    return Estimator(mode=cfg["estimator"], samples=cfg["mc_samples"], master_seed=cfg["seed"])


def _tower(cfg, default_level: int):
    from .mazery.scaleup import build_tower

    level = cfg["level"] or default_level
    r0 = cfg["r0"] if cfg["r0"] is not None else 16.0
    return build_tower(cfg["m"], cfg["window"], cfg["seed"], level, cfg["loops"],
                       _estimator(cfg), R0=r0)


def _dump_meta(cfg, level):
    r0 = cfg["r0"] if cfg["r0"] is not None else 16.0
    return {"m": cfg["m"], "window": cfg["window"], "seed": cfg["seed"], "level": level,
            "loops": bool(cfg["loops"]), "r0": float(r0), "estimator": cfg["estimator"],
            "mc_samples": cfg["mc_samples"]}


def cmd_scaleup(cfg):
    from .mazery.conditions import check_conditions
    from .mazery.dump import dump_mazery, format_dump

    tower = _tower(cfg, 2)
    ok = True
    for M in tower[1:]:
        report = check_conditions(M, seed=cfg["seed"])
        ok &= report.passed
        print(f"level {M.level} conditions: {'PASS' if report.passed else 'FAIL'}",
              file=sys.stderr)
        for line in report.lines():
            print(line, file=sys.stderr)
    top = tower[-1]
    _emit(cfg, format_dump(dump_mazery(top, meta=_dump_meta(cfg, top.level))))
    return EXIT_OK if ok else EXIT_INVALID


def cmd_params(cfg):
    exps = _exponents(cfg)
    p = level_params(exps, cfg["level"] or 1, strict=False)
    lines = [f"{key}={value:.10g}" for key, value in p.as_dict().items()]
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_check_inequalities(cfg):
    report = check_inequalities(_exponents(cfg))
    _emit(cfg, "\n".join(report.lines()) + "\n")
    return EXIT_OK if report.all_passed else EXIT_INVALID


def cmd_verify(cfg):
    from .mazery.dump import MAGIC, dump_mazery, format_dump, parse_dump

    try:
        text = Path(cfg.path).read_text()
    except OSError as exc:
        raise InvalidParameter(f"cannot read {cfg.path}: {exc}") from None
    if text.startswith(MAGIC):
        return _verify_dump(text, parse_dump, dump_mazery, format_dump)
    sched = read_schedule(cfg.path)
    # the walks must be regenerated with the --n used when the schedule was made
    x, y = _walk_pair(cfg, cfg["n"])
    ok = verify_no_collision(x.values[:len(sched.t0)], y.values[:len(sched.t1)], sched)
    print(f"{'PASS' if ok else 'FAIL'} schedule {cfg.path} (m={cfg['m']}, seed={cfg['seed']})",
          file=sys.stderr)
    return EXIT_OK if ok else EXIT_INVALID


def _verify_dump(text, parse_dump, dump_mazery, format_dump):
    from .mazery.dump import verify_dump
    from .mazery.scaleup import build_tower
    from .mazery.estimator import Estimator

    dump = parse_dump(text)
    problems = verify_dump(dump)
    for line in problems:
        print(f"FAIL {line}", file=sys.stderr)
    meta = dump.meta
    needed = ("m", "window", "seed", "level", "r0", "estimator", "mc_samples")
    if all(k in meta for k in needed):
        est = Estimator(mode=str(meta["estimator"]), samples=int(meta["mc_samples"]),
                        master_seed=int(meta["seed"]))
        tower = build_tower(int(meta["m"]), int(meta["window"]), int(meta["seed"]),
                            int(meta["level"]), bool(meta.get("loops", 0)), est,
                            R0=float(meta["r0"]))
        rebuilt = format_dump(dump_mazery(tower[-1], meta=dump.meta, traps=dump.traps is not None))
        same = rebuilt == text
        print(f"{'PASS' if same else 'FAIL'} rebuild matches the dump", file=sys.stderr)
        if not same:
            problems.append("rebuild differs")
    else:
        print("rebuild skipped: dump has no build metadata", file=sys.stderr)
    if not problems:
        print("PASS dump invariants", file=sys.stderr)
    return EXIT_OK if not problems else EXIT_INVALID


def cmd_diagnostics(cfg):
    from .mazery.diagnostics import probability_diagnostics

    tower = _tower(cfg, 2)
    lines = []
    for k, M in enumerate(tower):
        report = probability_diagnostics(M, cfg["trials"], RngStream(cfg["seed"], 1000 + k))
        lines += report.lines()
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


HANDLERS = {
    "simulate": cmd_simulate,
    "binary": cmd_binary,
    "schedule": cmd_schedule,
    "scaleup": cmd_scaleup,
    "params": cmd_params,
    "check-inequalities": cmd_check_inequalities,
    "verify": cmd_verify,
    "diagnostics": cmd_diagnostics,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve(args)
        _validate(cfg)
    except UsageError as exc:
        print(f"demon-lab: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvalidParameter as exc:
        print(f"demon-lab: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(cfg.line(), file=sys.stderr)
    try:
        return HANDLERS[cfg.command](cfg)
    except InvalidParameter as exc:
        print(f"demon-lab: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ParameterRangeError as exc:
        print(f"demon-lab: parameter out of range: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, RuntimeError, ValueError, OverflowError) as exc:
        print(f"demon-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run_cli())
