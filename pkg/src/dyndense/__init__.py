"""Fully dynamic approximate densest subgraph for undirected, vertex-weighted and directed graphs."""

from .directed import DirectedDensest, DirectedDensityPair, dyadic_grid, geometric_grid
from .dynamic import DynamicDensest, DynamicStats, Ladder
from .fast import FastDynamicDensest, make_densest
from .lazy_labels import InvariantError, OrientationStore, StoreError, peel_bands
from .oracle import OracleLimitError, brute_directed, brute_undirected
from .stream import TraceRecord, UpdateStream, gen_random, parse, write_trace
from .threshold import ChainBudgetError, ThresholdInstance

__all__ = [
    "ChainBudgetError",
    "DirectedDensest",
    "DirectedDensityPair",
    "DynamicDensest",
    "DynamicStats",
    "FastDynamicDensest",
    "InvariantError",
    "Ladder",
    "OracleLimitError",
    "OrientationStore",
    "StoreError",
    "ThresholdInstance",
    "TraceRecord",
    "UpdateStream",
    "brute_directed",
    "brute_undirected",
    "dyadic_grid",
    "gen_random",
    "geometric_grid",
    "make_densest",
    "parse",
    "peel_bands",
    "write_trace",
]
