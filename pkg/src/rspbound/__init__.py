"""Bounds on the expected shortest path length in degradation DAGs with
independent Weibull transition times."""

from .bounds import BoundConfig, BoundReport, build_report
from .graph_model import DegradationGraph, figure1_graph, load_graph, parse_graph, validate
from .montecarlo import SimConfig, SimulationResult, estimate_expected_shortest
from .spath import dag_shortest_path, lp_from_graph
from .weibull import WeibullParams

__all__ = [
    "BoundConfig", "BoundReport", "build_report", "DegradationGraph", "figure1_graph", "load_graph",
    "parse_graph", "validate", "SimConfig", "SimulationResult", "estimate_expected_shortest",
    "dag_shortest_path", "lp_from_graph", "WeibullParams",
]
