"""Character vectors of extremal chiral CFTs with rank-2 and rank-3 representation categories."""

from .catalog import GenusSpec, ModularDatum, fold, get
from .characters import FundamentalExpansion, recurrence, resolve_gauge
from .connection import ConnectionSolution, solve_connection
from .extremal import ExponentCandidate, enumerate_extremal, trace_condition
from .scan import ScanConfig, ScanRow, compute, scan

__all__ = [
    "ConnectionSolution", "ExponentCandidate", "FundamentalExpansion", "GenusSpec", "ModularDatum",
    "ScanConfig", "ScanRow", "compute", "enumerate_extremal", "fold", "get", "recurrence",
    "resolve_gauge", "scan", "solve_connection", "trace_condition",
]
