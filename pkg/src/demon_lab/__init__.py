"""Simulation lab for the clairvoyant demon problem.

Two random walks on the complete graph ``K_m`` are scheduled by a demon who
knows both futures; blocking is oriented reachability in a dependent
percolation lattice, analysed with multi-scale toy structures (mazeries).
"""
from __future__ import annotations

from .exceptions import InsufficientData, InvalidParameter, ParameterRangeError
from .percolation import escape_record, reach_set, reachable_in_rect
from .rng import RngStream
from .walks import gen_bernoulli, gen_walk

__version__ = "0.1.0"

__all__ = [
    "InsufficientData",
    "InvalidParameter",
    "ParameterRangeError",
    "RngStream",
    "escape_record",
    "gen_bernoulli",
    "gen_walk",
    "reach_set",
    "reachable_in_rect",
    "__version__",
]
