import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from rspbound.errors import StructuralError
from rspbound.graph_model import DegradationGraph, figure1_graph
from rspbound.montecarlo import (SimConfig, _Summary, derive_stream, estimate_expected_shortest, open_uniforms,
                                 run_chunked, sample_costs)
from rspbound.weibull import WeibullParams, mean, second_moment

EXP = WeibullParams(1.0, 1.0)
# 1 -> 3 directly, or via 2; E[min(X, Y + W)] for unit exponentials
TWO_ROUTE = DegradationGraph(3, ((1, 3), (1, 2), (2, 3)), (EXP, EXP, EXP))


def two_route_oracle():
    # P(min > t) = exp(-t) * P(Y + W > t) = exp(-t) * (1 + t) exp(-t)
    val, _ = integrate.quad(lambda t: np.exp(-2 * t) * (1 + t), 0, np.inf)
    return val


def test_oracle_value():
    assert two_route_oracle() == pytest.approx(0.75, rel=1e-12)


def test_streams_are_pure_and_separated():
    a = derive_stream(7, 3, (1, 2)).random(5)
    assert np.array_equal(a, derive_stream(7, 3, (1, 2)).random(5))
    assert not np.array_equal(a, derive_stream(7, 4, (1, 2)).random(5))
    assert not np.array_equal(a, derive_stream(7, 3, (1, 3)).random(5))
    assert not np.array_equal(a, derive_stream(8, 3, (1, 2)).random(5))


def test_open_uniforms_are_interior_and_uniform():
    u = open_uniforms(derive_stream(1, 0), 200_000)
    assert u.min() > 0 and u.max() < 1
    counts, _ = np.histogram(u, bins=50, range=(0, 1))
    assert stats.chisquare(counts).pvalue > 1e-3


@pytest.mark.parametrize("p", [WeibullParams(1.0, 1.5), WeibullParams(2.5, 1.0), WeibullParams(0.5, 2.0)])
def test_sample_moments(p):
    x = sample_costs([p], derive_stream(3, 0), 400_000)[:, 0]
    se = np.sqrt(second_moment(p) / x.size)
    assert abs(x.mean() - mean(p)) < 5 * se
    assert stats.kstest(x, "weibull_min", args=(p.gamma, 0, p.eta)).pvalue > 1e-3


def test_summary_merge_matches_pooled():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=37), rng.normal(3, 2, size=91)
    m = _Summary.of(a).merge(_Summary.of(b))
    both = np.concatenate([a, b])
    assert m.count == 128
    assert m.mean == pytest.approx(both.mean(), rel=1e-14)
    assert m.m2 == pytest.approx(((both - both.mean()) ** 2).sum(), rel=1e-12)


@given(st.integers(1, 3000), st.integers(1, 700), st.integers(1, 5))
@settings(max_examples=40, deadline=None)
def test_result_independent_of_workers(samples, chunk, workers):
    def fn(rng, n):
        return rng.random(n)

    one = run_chunked(fn, samples, 11, chunk, 1, (9,))
    many = run_chunked(fn, samples, 11, chunk, workers, (9,))
    assert one[:1] == many[:1] and one[2] == many[2] == samples
    assert (np.isnan(one[1]) and np.isnan(many[1])) or one[1] == many[1]


def test_expected_shortest_two_route():
    res = estimate_expected_shortest(TWO_ROUTE, SimConfig(200_000, 5))
    assert abs(res.mean - two_route_oracle()) < 3 * res.stderr
    assert res.ci95[0] < res.mean < res.ci95[1]
    assert res.samples == 200_000 and res.seed == 5


def test_expected_shortest_deterministic():
    g = figure1_graph()
    a = estimate_expected_shortest(g, SimConfig(10_000, 7, 1000, 1))
    b = estimate_expected_shortest(g, SimConfig(10_000, 7, 1000, 4))
    assert a == b
    assert a != estimate_expected_shortest(g, SimConfig(10_000, 8, 1000, 1))


def test_ci_coverage_single_exponential():
    g = DegradationGraph(2, ((1, 2),), (EXP,))
    hits = 0
    for seed in range(300):
        r = estimate_expected_shortest(g, SimConfig(400, seed, 400))
        hits += r.ci95[0] <= 1.0 <= r.ci95[1]
    assert 0.91 <= hits / 300 <= 0.985


def test_stderr_scales_like_inverse_sqrt_n():
    small = estimate_expected_shortest(TWO_ROUTE, SimConfig(10_000, 1)).stderr
    large = estimate_expected_shortest(TWO_ROUTE, SimConfig(160_000, 1)).stderr
    assert small / large == pytest.approx(4.0, rel=0.05)


def test_single_sample_has_nan_stderr():
    _, se, n = run_chunked(lambda rng, k: rng.random(k), 1, 0)
    assert n == 1 and np.isnan(se)


@pytest.mark.parametrize("kwargs", [dict(samples=0), dict(chunk_size=0), dict(workers=0), dict(seed=-1)])
def test_config_validation(kwargs):
    with pytest.raises(StructuralError):
        SimConfig(**kwargs)
