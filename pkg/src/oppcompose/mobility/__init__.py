"""Mobility trace generation and ingestion.

All generators return a :class:`PositionTrace`: per-node positions sampled
on a uniform time grid inside a rectangular area.  Generation is a pure
function of (params, seed).
"""

from .trace import PositionTrace, load_trace_csv, save_trace_csv
from .levy import LevyWalkParams, generate_levy
from .slaw import SlawParams, generate_slaw
from .hcmm import HcmmParams, generate_hcmm
from .gps import ingest_gps_log

__all__ = [
    "PositionTrace",
    "load_trace_csv",
    "save_trace_csv",
    "LevyWalkParams",
    "generate_levy",
    "SlawParams",
    "generate_slaw",
    "HcmmParams",
    "generate_hcmm",
    "ingest_gps_log",
]
