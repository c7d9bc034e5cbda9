"""Shortest paths on degradation DAGs and their LP formulation.

:func:`dag_shortest_path` is a plain dynamic program over a topological
order; it is the referee against which the extended-incidence LP is checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InfeasibleError, PreconditionError, StructuralError
from .graph_model import (DegradationGraph, PathVector, build_incidence, demand_vector,
                          extend_incidence, topological_order, validate)
from .lp_core import LinearProgram, solve_deterministic


@dataclass(frozen=True)
class ShortestPathResult:
    length: object  # same numeric type as the costs
    path: tuple[int, ...]
    vector: PathVector


def lp_from_graph(g: DegradationGraph) -> LinearProgram:
    """Extended-incidence LP: ``A = [A0 | e]``, ``b = (-1, 0, ..., 0, 1)``, zero cost on ``e``."""
    diag = validate(g)
    if not diag.passed:
        raise StructuralError("invalid graph: " + "; ".join(diag.messages))
    a = extend_incidence(build_incidence(g))
    return LinearProgram(a, demand_vector(g.node_count), tuple(g.params) + (Fraction(0),))


def dag_shortest_path(g: DegradationGraph, costs: Sequence) -> ShortestPathResult:
    """Exact DP; ties keep the smallest incoming edge index."""
    if len(costs) != g.edge_count:
        raise StructuralError(f"expected {g.edge_count} edge costs, got {len(costs)}")
    if any(not (c >= 0) or (isinstance(c, float) and math.isinf(c)) for c in costs):
        raise PreconditionError("edge costs must be finite and nonnegative")
    order = topological_order(g)
    if order is None:
        raise StructuralError("shortest paths need an acyclic graph")
    incoming = g.in_edges()
    dist: dict[int, object] = {g.source: 0 * costs[0] if costs else 0}
    pred: dict[int, int] = {}
    for v in order:
        if v == g.source:
            continue
        for e in incoming[v]:
            u = g.edges[e][0]
            if u not in dist:
                continue
            cand = dist[u] + costs[e]
            if v not in dist or cand < dist[v]:
                dist[v] = cand
                pred[v] = e
    if g.sink not in dist:
        raise InfeasibleError(f"node {g.sink} is not reachable from node 1")
    edges = []
    v = g.sink
    while v != g.source:
        e = pred[v]
        edges.append(e)
        v = g.edges[e][0]
    edges.reverse()
    nodes = (g.source,) + tuple(g.edges[e][1] for e in edges)
    x = [0] * (g.edge_count + 1)
    for e in edges:
        x[e] = 1
    return ShortestPathResult(dist[g.sink], nodes, PathVector(tuple(edges), nodes, tuple(x)))


def batch_shortest_lengths(g: DegradationGraph, costs: np.ndarray) -> np.ndarray:
    """Shortest 1 -> n length for every row of a ``(samples, m)`` cost array."""
    costs = np.asarray(costs, dtype=float)
    order = topological_order(g)
    if order is None:
        raise StructuralError("shortest paths need an acyclic graph")
    incoming = g.in_edges()
    inf = np.full(costs.shape[0], np.inf)
    dist = {g.source: np.zeros(costs.shape[0])}
    for v in order:
        if v == g.source:
            continue
        best = inf
        for e in incoming[v]:
            u = g.edges[e][0]
            if u in dist:
                best = np.minimum(best, dist[u] + costs[:, e])
        dist[v] = best
    out = dist[g.sink]
    if np.isinf(out).any():
        raise InfeasibleError(f"node {g.sink} is not reachable from node 1")
    return out


@dataclass
class EquivalenceReport:
    lp_value: object
    dp_value: object
    extended_component: Fraction
    values_equal: bool
    extended_zero: bool

    @property
    def passed(self) -> bool:
        return self.values_equal and self.extended_zero


def verify_lp_equivalence(g: DegradationGraph, costs: Sequence, rel_tol: float = 1e-9) -> EquivalenceReport:
    """Solve the extended LP and the DP; values must agree and ``x_{m+1}`` must be 0."""
    lp = lp_from_graph(g)
    sol = solve_deterministic(lp, list(costs) + [0])
    dp = dag_shortest_path(g, list(costs))
    if all(isinstance(c, (int, Fraction)) for c in costs):
        equal = sol.value == Fraction(dp.length)
    else:
        equal = math.isclose(float(sol.value), float(dp.length), rel_tol=rel_tol, abs_tol=rel_tol)
    ext = sol.x[-1]
    return EquivalenceReport(sol.value, dp.length, ext, equal, ext == 0)
