"""Degradation DAGs, their incidence matrices and path enumeration.

Nodes are numbered ``1..n`` everywhere in the public interface; node 1 is the
new-system state and node ``n`` the unacceptable-degradation state.  Column
``j`` (0-based) of every incidence matrix is edge ``j`` in input order.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import GraphFormatError, ResourceLimitError, StructuralError
from .exact_linalg import RationalMatrix
from .weibull import WeibullParams

DEFAULT_PATH_CAP = 10**6


@dataclass(frozen=True)
class DegradationGraph:
    node_count: int
    edges: tuple[tuple[int, int], ...]
    params: tuple[WeibullParams, ...]

    def __post_init__(self):
        n = self.node_count
        if not isinstance(n, int) or n < 2:
            raise StructuralError(f"node_count must be an integer >= 2, got {n!r}")
        object.__setattr__(self, "edges", tuple((int(t), int(h)) for t, h in self.edges))
        object.__setattr__(self, "params", tuple(self.params))
        if len(self.params) != len(self.edges):
            raise StructuralError(f"{len(self.edges)} edges but {len(self.params)} parameter sets")
        seen = set()
        for j, (t, h) in enumerate(self.edges):
            if not (1 <= t <= n and 1 <= h <= n):
                raise StructuralError(f"edge {j + 1} ({t},{h}) has a node id outside 1..{n}")
            if t == h:
                raise StructuralError(f"edge {j + 1} ({t},{h}) is a self-loop")
            if (t, h) in seen:
                raise StructuralError(f"edge {j + 1} ({t},{h}) duplicates an earlier edge")
            seen.add((t, h))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def source(self) -> int:
        return 1

    @property
    def sink(self) -> int:
        return self.node_count

    def out_edges(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.node_count + 1)}
        for j, (t, _) in enumerate(self.edges):
            adj[t].append(j)
        return adj

    def in_edges(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.node_count + 1)}
        for j, (_, h) in enumerate(self.edges):
            adj[h].append(j)
        return adj


@dataclass(frozen=True)
class PathVector:
    """A 1 -> n path as edge indices, node sequence and 0/1 vector of length m+1."""

    edges: tuple[int, ...]
    nodes: tuple[int, ...]
    x: tuple[int, ...]

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.edges)


@dataclass
class Diagnostics:
    checks: dict[str, bool] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)
    info: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def lines(self) -> list[str]:
        out = [f"{k}: {'true' if v else 'false'}" for k, v in self.checks.items()]
        out += [f"{k} (informational): {'true' if v else 'false'}" for k, v in self.info.items()]
        out += [f"- {m}" for m in self.messages]
        out.append(f"valid: {'true' if self.passed else 'false'}")
        return out


def topological_order(g: DegradationGraph) -> list[int] | None:
    """Kahn's algorithm, smallest ready node first; ``None`` if there is a cycle."""
    indeg = {v: 0 for v in range(1, g.node_count + 1)}
    for _, h in g.edges:
        indeg[h] += 1
    succ = {v: [] for v in indeg}
    for t, h in g.edges:
        succ[t].append(h)
    ready = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(ready, w)
    return order if len(order) == g.node_count else None


def _reachable(g: DegradationGraph, start: int, forward: bool = True) -> set[int]:
    nbrs = {v: [] for v in range(1, g.node_count + 1)}
    for t, h in g.edges:
        if forward:
            nbrs[t].append(h)
        else:
            nbrs[h].append(t)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in nbrs[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def _weakly_connected(g: DegradationGraph) -> bool:
    parent = list(range(g.node_count + 1))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for t, h in g.edges:
        parent[find(t)] = find(h)
    return len({find(v) for v in range(1, g.node_count + 1)}) == 1


def validate(g: DegradationGraph) -> Diagnostics:
    diag = Diagnostics()
    order = topological_order(g)
    diag.checks["acyclic"] = order is not None
    if order is None:
        diag.messages.append("cycle: the graph has a directed cycle")
    reach = _reachable(g, g.source)
    diag.checks["sink_reachable"] = g.sink in reach
    if g.sink not in reach:
        diag.messages.append(f"reachability: node {g.sink} is not reachable from node 1")
    diag.checks["connected"] = _weakly_connected(g)
    if not diag.checks["connected"]:
        diag.messages.append("connectivity: the underlying undirected graph is disconnected")
    bad = [j for j, p in enumerate(g.params) if not p.is_valid()]
    diag.checks["parameters"] = not bad
    for j in bad:
        p = g.params[j]
        diag.messages.append(f"parameter: edge {j + 1} {g.edges[j]} has eta={p.eta}, gamma={p.gamma} (both must be > 0)")
    # optional: every maximal path ends at the sink
    sinks = {v for v in range(1, g.node_count + 1) if all(t != v for t, _ in g.edges)}
    diag.info["maximal_paths_end_at_sink"] = sinks == {g.sink}
    return diag


def build_incidence(g: DegradationGraph) -> RationalMatrix:
    """n x m matrix: column of edge (i, j) has -1 in row i and +1 in row j."""
    n, m = g.node_count, g.edge_count
    rows = [[0] * m for _ in range(n)]
    for j, (t, h) in enumerate(g.edges):
        if not (1 <= t <= n and 1 <= h <= n):
            raise StructuralError(f"edge {j + 1} has invalid node id")
        rows[t - 1][j] = -1
        rows[h - 1][j] = 1
    return RationalMatrix.from_rows(rows)


def extend_incidence(a0: RationalMatrix) -> RationalMatrix:
    """Append the all-ones column: ``[A0 | e]``."""
    return RationalMatrix.from_rows([list(row) + [1] for row in a0.rows])


def demand_vector(n: int) -> tuple[Fraction, ...]:
    if n < 2:
        raise StructuralError(f"demand vector needs n >= 2, got {n}")
    return tuple(Fraction(v) for v in [-1] + [0] * (n - 2) + [1])


def enumerate_paths(g: DegradationGraph, cap: int = DEFAULT_PATH_CAP) -> list[PathVector]:
    """All directed 1 -> n paths, depth first in edge order."""
    if topological_order(g) is None:
        raise StructuralError("path enumeration needs an acyclic graph")
    adj = g.out_edges()
    m = g.edge_count
    paths: list[PathVector] = []
    stack: list[int] = []

    def walk(v: int, nodes: list[int]):
        if v == g.sink:
            if len(paths) >= cap:
                raise ResourceLimitError(f"more than cap={cap} paths from 1 to {g.sink}")
            x = [0] * (m + 1)
            for e in stack:
                x[e] = 1
            paths.append(PathVector(tuple(stack), tuple(nodes), tuple(x)))
            return
        for e in adj[v]:
            w = g.edges[e][1]
            stack.append(e)
            nodes.append(w)
            walk(w, nodes)
            nodes.pop()
            stack.pop()

    walk(g.source, [g.source])
    return paths


def parse_graph(text: str) -> DegradationGraph:
    """Parse the line-oriented graph format.

    ::

        nodes 5
        edge 1 2 eta=1.0 gamma=1.5   # comment
    """
    n = None
    edges: list[tuple[int, int]] = []
    params: list[WeibullParams] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "nodes":
            if n is not None:
                raise GraphFormatError(lineno, "duplicate 'nodes' line")
            if len(tok) != 2:
                raise GraphFormatError(lineno, "expected 'nodes <n>'")
            try:
                n = int(tok[1])
            except ValueError:
                raise GraphFormatError(lineno, f"node count {tok[1]!r} is not an integer") from None
            if n < 2:
                raise GraphFormatError(lineno, "node count must be >= 2")
        elif tok[0] == "edge":
            if n is None:
                raise GraphFormatError(lineno, "'edge' before 'nodes'")
            if len(tok) != 5:
                raise GraphFormatError(lineno, "expected 'edge <tail> <head> eta=<float> gamma=<float>'")
            try:
                t, h = int(tok[1]), int(tok[2])
            except ValueError:
                raise GraphFormatError(lineno, "edge endpoints must be integers") from None
            kv = {}
            for item in tok[3:]:
                key, sep, val = item.partition("=")
                if not sep or key not in ("eta", "gamma") or key in kv:
                    raise GraphFormatError(lineno, f"bad parameter {item!r}")
                try:
                    kv[key] = float(val)
                except ValueError:
                    raise GraphFormatError(lineno, f"{key} value {val!r} is not a number") from None
            if not (1 <= t <= n and 1 <= h <= n):
                raise GraphFormatError(lineno, f"edge ({t},{h}) has a node id outside 1..{n}")
            if t == h:
                raise GraphFormatError(lineno, f"edge ({t},{h}) is a self-loop")
            if (t, h) in edges:
                raise GraphFormatError(lineno, f"duplicate edge ({t},{h})")
            edges.append((t, h))
            params.append(WeibullParams(kv["eta"], kv["gamma"]))
        else:
            raise GraphFormatError(lineno, f"unknown directive {tok[0]!r}")
    if n is None:
        raise GraphFormatError(0, "missing 'nodes' line")
    return DegradationGraph(n, tuple(edges), tuple(params))


def load_graph(path: str | Path) -> DegradationGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def format_graph(g: DegradationGraph) -> str:
    lines = [f"nodes {g.node_count}"]
    for (t, h), p in zip(g.edges, g.params):
        lines.append(f"edge {t} {h} eta={p.eta!r} gamma={p.gamma!r}")
    return "\n".join(lines) + "\n"


FIGURE1_EDGES = ((1, 2), (1, 3), (1, 4), (2, 3), (3, 4), (3, 5), (4, 5))


def figure1_graph(eta: float = 1.0, gamma: float = 1.5) -> DegradationGraph:
    """The 5-state, 7-transition example graph with identical Weibull edges."""
    return DegradationGraph(5, FIGURE1_EDGES, tuple(WeibullParams(eta, gamma) for _ in FIGURE1_EDGES))


def random_dag(rng: np.random.Generator, n: int, m: int,
               eta_range: tuple[float, float] = (0.5, 2.0),
               gamma_range: tuple[float, float] = (1.0, 2.0)) -> DegradationGraph:
    """Random weakly connected DAG on ``n`` nodes with ``m`` edges and 1 -> n reachable.

    Edges point from lower to higher node id.  Starts from a random 1 -> n
    spine, attaches each leftover node to an already connected one, then adds random forward edges.
    """
    max_m = n * (n - 1) // 2
    if not (n - 1 <= m <= max_m):
        raise StructuralError(f"need n-1 <= m <= {max_m} for n={n}, got m={m}")
    inner = [v for v in range(2, n) if rng.random() < 0.5]
    spine = [1] + inner + [n]
    edges: list[tuple[int, int]] = list(zip(spine[:-1], spine[1:]))
    present = set(edges)
    attached = list(spine)
    for v in rng.permutation([v for v in range(2, n) if v not in spine]):
        u = attached[int(rng.integers(len(attached)))]
        e = (min(u, int(v)), max(u, int(v)))
        edges.append(e)
        present.add(e)
        attached.append(int(v))
    candidates = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if (i, j) not in present]
    extra = rng.choice(len(candidates), size=m - len(edges), replace=False) if m > len(edges) else []
    edges += [candidates[k] for k in sorted(extra)]
    order = rng.permutation(len(edges))
    edges = [edges[k] for k in order]
    params = tuple(WeibullParams(float(rng.uniform(*eta_range)), float(rng.uniform(*gamma_range))) for _ in edges)
    return DegradationGraph(n, tuple(edges), params)
