"""Seeded, chunked Monte Carlo.

Generator contract: chunk ``k`` of a run keyed by ``key`` draws from
``PCG64(SeedSequence(seed, spawn_key=(*key, k)))``.  The sample budget is cut
into fixed chunks, chunk summaries (count, mean, sum of squared deviations)
are merged in chunk order, so results do not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import StructuralError
from .graph_model import DegradationGraph
from .spath import batch_shortest_lengths
from .weibull import WeibullParams, sample

Z95 = 1.96
_U53 = 2.0**53


@dataclass(frozen=True)
class SimConfig:
    samples: int = 100_000
    seed: int = 1
    chunk_size: int = 4096
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise StructuralError("samples must be >= 1")
        if self.chunk_size < 1:
            raise StructuralError("chunk_size must be >= 1")
        if self.workers < 1:
            raise StructuralError("workers must be >= 1")
        if self.seed < 0:
            raise StructuralError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class SimulationResult:
    mean: float
    stderr: float
    ci95: tuple[float, float]
    samples: int
    seed: int


@dataclass(frozen=True)
class _Summary:
    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, values: np.ndarray) -> _Summary:
        mu = float(values.mean())
        return cls(values.size, mu, float(((values - mu) ** 2).sum()))

    def merge(self, other: _Summary) -> _Summary:
        n = self.count + other.count
        delta = other.mean - self.mean
        return _Summary(n, self.mean + delta * other.count / n,
                        self.m2 + other.m2 + delta * delta * self.count * other.count / n)


def derive_stream(seed: int, chunk_index: int, key: Sequence[int] = ()) -> np.random.Generator:
    """Pure function of its arguments: same inputs, same stream."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(*key, chunk_index))
    return np.random.Generator(np.random.PCG64(ss))


def open_uniforms(rng: np.random.Generator, size) -> np.ndarray:
    """Uniforms on the open interval (0, 1): midpoints of a 2**-53 grid."""
    return (rng.integers(0, 2**53, size=size).astype(float) + 0.5) / _U53


def sample_costs(params: DegradationGraph | Sequence[WeibullParams], rng: np.random.Generator,
                 size: int = 1) -> np.ndarray:
    """Independent inverse-CDF Weibull draws, shape ``(size, m)``."""
    ps = params.params if isinstance(params, DegradationGraph) else tuple(params)
    u = open_uniforms(rng, (size, len(ps)))
    out = np.empty_like(u)
    for j, p in enumerate(ps):
        out[:, j] = sample(p, u[:, j])
    return out


def run_chunked(fn: Callable[[np.random.Generator, int], np.ndarray], samples: int, seed: int,
                chunk_size: int = 4096, workers: int = 1, key: Sequence[int] = ()) -> tuple[float, float, int]:
    """Evaluate ``fn(rng, count)`` over fixed chunks; return (mean, stderr, n)."""
    counts = [min(chunk_size, samples - start) for start in range(0, samples, chunk_size)]

    def one(k: int) -> _Summary:
        return _Summary.of(np.asarray(fn(derive_stream(seed, k, key), counts[k]), dtype=float))

    if workers > 1 and len(counts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(len(counts))))
    else:
        parts = [one(k) for k in range(len(counts))]
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    stderr = math.sqrt(total.m2 / (total.count - 1) / total.count) if total.count > 1 else math.nan
    return total.mean, stderr, total.count


def to_result(mean: float, stderr: float, samples: int, seed: int) -> SimulationResult:
    half = Z95 * stderr
    return SimulationResult(mean, stderr, (mean - half, mean + half), samples, seed)


def estimate_expected_shortest(g: DegradationGraph, cfg: SimConfig, key: Sequence[int] = (0,)) -> SimulationResult:
    """Monte Carlo estimate of the expected shortest 1 -> n path length."""

    def chunk(rng, count):
        return batch_shortest_lengths(g, sample_costs(g, rng, count))

    mu, se, n = run_chunked(chunk, cfg.samples, cfg.seed, cfg.chunk_size, cfg.workers, key)
    return to_result(mu, se, n, cfg.seed)
