"""Multi-scale mazery structures at toy scale: traps, walls, cleanness, scale-up."""
from __future__ import annotations

from .cleanness import CleannessRelations, Rect, base_cleanness, scale_cleanness
from .conditions import ConditionReport, ConditionResult, check_conditions
from .detect import (derive_compound, derive_emerging, designate_walls, detect_correlated,
                     detect_missing_hole, detect_uncorrelated)
from .diagnostics import DiagnosticsReport, probability_diagnostics
from .dump import dump_mazery, format_dump, parse_dump, read_dump, verify_dump, write_dump
from .estimator import Estimator, colorset_distribution, estimate_cond_prob
from .holes import find_hole, iter_holes
from .objects import CondProbEstimate, Direction, Hole, Interval, Trap, TrapKind, WallValue
from .scaleup import build_tower, scale_up, toy_ladder
from .structure import BaseTraps, ExplicitTraps, Mazery, base_mazery, base_params

__all__ = [
    "BaseTraps",
    "CleannessRelations",
    "CondProbEstimate",
    "ConditionReport",
    "ConditionResult",
    "DiagnosticsReport",
    "Direction",
    "Estimator",
    "ExplicitTraps",
    "Hole",
    "Interval",
    "Mazery",
    "Rect",
    "Trap",
    "TrapKind",
    "WallValue",
    "base_cleanness",
    "base_mazery",
    "base_params",
    "build_tower",
    "check_conditions",
    "colorset_distribution",
    "derive_compound",
    "derive_emerging",
    "designate_walls",
    "detect_correlated",
    "detect_missing_hole",
    "detect_uncorrelated",
    "dump_mazery",
    "estimate_cond_prob",
    "find_hole",
    "format_dump",
    "iter_holes",
    "parse_dump",
    "probability_diagnostics",
    "read_dump",
    "scale_cleanness",
    "scale_up",
    "toy_ladder",
    "verify_dump",
    "write_dump",
]
