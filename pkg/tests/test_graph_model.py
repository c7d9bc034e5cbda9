import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIG1_A, FIG1_A0
from rspbound.errors import GraphFormatError, ResourceLimitError, StructuralError
from rspbound.exact_linalg import RationalMatrix, is_totally_unimodular, rank
from rspbound.graph_model import (DegradationGraph, build_incidence, demand_vector, enumerate_paths,
                                  extend_incidence, figure1_graph, format_graph, load_graph, parse_graph,
                                  random_dag, topological_order, validate)
from rspbound.weibull import WeibullParams


def _graph(n, edges, eta=1.0, gamma=1.5):
    return DegradationGraph(n, tuple(edges), tuple(WeibullParams(eta, gamma) for _ in edges))


def test_fig1_incidence_entries(fig1):
    a0 = build_incidence(fig1)
    assert a0 == RationalMatrix.from_rows(FIG1_A0)
    assert extend_incidence(a0) == RationalMatrix.from_rows(FIG1_A)
    assert rank(a0) == 4 and rank(extend_incidence(a0)) == 5


def test_single_edge_incidence(single_edge):
    assert build_incidence(single_edge) == RationalMatrix.from_rows([[-1], [1]])
    assert extend_incidence(build_incidence(single_edge)).rows == ((-1, 1), (1, 1))


def test_demand_vector():
    assert demand_vector(2) == (-1, 1)
    assert demand_vector(5) == (-1, 0, 0, 0, 1)
    with pytest.raises(StructuralError):
        demand_vector(1)


@pytest.mark.parametrize("seed", range(10))
def test_incidence_columns_sum_to_zero_and_tum(seed):
    g = random_dag(np.random.default_rng(seed), 5, 7)
    a0 = build_incidence(g)
    for j in range(g.edge_count):
        col = a0.column(j)
        assert sum(col) == 0 and sorted(col)[0] == -1 and sorted(col)[-1] == 1
    assert is_totally_unimodular(a0, max_order=5)


def _paths_by_subsets(g):
    """Oracle: edge subsets that form a single 1 -> n walk visiting each node at most once."""
    found = set()
    for r in range(1, g.edge_count + 1):
        for sub in itertools.combinations(range(g.edge_count), r):
            out = {}
            for j in sub:
                out.setdefault(g.edges[j][0], []).append(j)
            if any(len(v) > 1 for v in out.values()):
                continue
            v, used = g.source, []
            while v in out and len(used) <= r:
                j = out[v][0]
                used.append(j)
                v = g.edges[j][1]
            if v == g.sink and len(used) == r:
                found.add(frozenset(sub))
    return found


def test_fig1_has_five_paths(fig1):
    paths = enumerate_paths(fig1)
    assert len(paths) == 5
    assert {p.nodes for p in paths} == {(1, 2, 3, 4, 5), (1, 2, 3, 5), (1, 3, 4, 5), (1, 3, 5), (1, 4, 5)}
    assert {p.support for p in paths} == _paths_by_subsets(fig1)
    for p in paths:
        assert len(p.x) == 8 and p.x[-1] == 0 and sum(p.x) == len(p.edges)


@pytest.mark.parametrize("seed", range(8))
def test_paths_match_subset_oracle(seed):
    g = random_dag(np.random.default_rng(100 + seed), 6, 9)
    assert {p.support for p in enumerate_paths(g)} == _paths_by_subsets(g)


def test_path_vectors_satisfy_flow(fig1):
    a = extend_incidence(build_incidence(fig1))
    for p in enumerate_paths(fig1):
        assert a @ p.x == demand_vector(5)


def test_enumerate_paths_cap_and_cycle(fig1):
    with pytest.raises(ResourceLimitError):
        enumerate_paths(fig1, cap=3)
    with pytest.raises(StructuralError):
        enumerate_paths(_graph(3, [(1, 2), (2, 1), (2, 3)]))


def test_topological_order(fig1):
    assert topological_order(fig1) == [1, 2, 3, 4, 5]
    assert topological_order(_graph(3, [(1, 2), (2, 3), (3, 2)])) is None


def test_validate_fig1(fig1):
    d = validate(fig1)
    assert d.passed
    assert "acyclic: true" in d.lines()
    assert d.info["maximal_paths_end_at_sink"]


@pytest.mark.parametrize("edges, failing", [
    ([(1, 2), (2, 1), (2, 3)], "acyclic"),
    ([(1, 2), (3, 2)], "sink_reachable"),
    ([(1, 4), (2, 3)], "connected"),
])
def test_validate_structural_failures(edges, failing):
    n = max(max(e) for e in edges)
    d = validate(_graph(n, edges))
    assert not d.passed and not d.checks[failing]
    assert any(line == f"{failing}: false" for line in d.lines())


def test_validate_bad_parameter():
    g = DegradationGraph(2, ((1, 2),), (WeibullParams(0.0, 1.5),))
    d = validate(g)
    assert not d.checks["parameters"] and d.checks["acyclic"]
    assert "edge 1" in d.messages[0]


def test_dead_end_is_informational_only():
    d = validate(_graph(4, [(1, 2), (2, 4), (1, 3)]))
    assert d.passed and not d.info["maximal_paths_end_at_sink"]


@pytest.mark.parametrize("edges, msg", [
    ([(1, 1)], "self-loop"),
    ([(1, 2), (1, 2)], "duplicates"),
    ([(1, 4)], "outside"),
])
def test_graph_structural_errors(edges, msg):
    with pytest.raises(StructuralError, match=msg):
        _graph(3, edges)


def test_parse_roundtrip(fig1):
    text = format_graph(fig1)
    assert parse_graph(text) == fig1
    assert parse_graph("# header\n\n" + text.replace("\n", "  # c\n", 1)) == fig1


def test_load_data_file():
    g = load_graph("data/fig1.graph")
    assert g == figure1_graph(1.0, 1.5)


@pytest.mark.parametrize("text, lineno, msg", [
    ("nodes 3\nedge 1 2 eta=1 gamma=1\nedge 2 3 eta=x gamma=1\n", 3, "not a number"),
    ("edge 1 2 eta=1 gamma=1\n", 1, "before 'nodes'"),
    ("nodes 3\n\nedge 1 2 eta=1\n", 3, "expected"),
    ("nodes 3\nedge 1 2 eta=1 gamma=1\nedge 1 2 eta=1 gamma=2\n", 3, "duplicate edge"),
    ("nodes 3\nnode 1\n", 2, "unknown directive"),
    ("nodes 2\nedge 1 5 eta=1 gamma=1\n", 2, "outside"),
    ("nodes 2\nedge 1 2 eta=1 beta=1\n", 2, "bad parameter"),
    ("nodes two\n", 1, "not an integer"),
])
def test_parse_errors_carry_line_numbers(text, lineno, msg):
    with pytest.raises(GraphFormatError, match=msg) as exc:
        parse_graph(text)
    assert exc.value.lineno == lineno
    assert str(exc.value).startswith(f"line {lineno}:")


def test_parse_keeps_invalid_parameters_for_diagnostics():
    g = parse_graph("nodes 2\nedge 1 2 eta=-1 gamma=1\n")
    assert not validate(g).checks["parameters"]


@given(st.integers(0, 2**32 - 1), st.integers(3, 8), st.data())
@settings(max_examples=60, deadline=None)
def test_random_dag_properties(seed, n, data):
    m = data.draw(st.integers(n - 1, n * (n - 1) // 2))
    g = random_dag(np.random.default_rng(seed), n, m)
    assert g.edge_count == m
    assert validate(g).passed
    assert all(t < h for t, h in g.edges)
    assert all(1 <= p.gamma <= 2 for p in g.params)
