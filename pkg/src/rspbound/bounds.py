"""Bounds on the expected optimal value ``E[z]`` of a random LP.

Upper side: the deterministic surrogate ``zeta = min E[c]^T x`` and the
sorted-sum bound ``max_{|S| = s} sum_{i in S} E[c_i] x_i``.

Lower side::

    E[z] >= (1/beta) * sum_{B in family} p_B * E[c_B]^T x_B

where ``p_B`` is the probability that basis ``B`` is optimal and ``x`` is a
feasible vector vanishing outside the family's admissible index set.  ``p_B``
is either estimated by conditional Monte Carlo of the product formula

    p_B = E[ prod_{i not in B} P(c_i >= sum_j alpha_ji c_j | c_B) ]

(used conservatively as estimate - 2 stderr) or bounded below in closed form
for Weibull costs with shapes in [1, 2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import PreconditionError, StructuralError
from .graph_model import DegradationGraph, enumerate_paths
from .lp_core import (Basis, DeterministicSolution, LinearProgram, WitnessUnavailable, admissible_witness,
                      enumerate_bases, family_index_set, solve_deterministic)
from .montecarlo import SimConfig, estimate_expected_shortest, open_uniforms, run_chunked
from .spath import lp_from_graph
from .weibull import BetaCondition, WeibullParams, mean, second_moment, verify_beta_condition

FAMILIES = ("deterministic-optimal", "k-cheapest-paths")
PB_VARIANTS = ("rederived-power", "as-printed")
PB_SOURCES = ("formula-mc", "closed-form")
KHINTCHINE_AGGREGATE = 4 * math.sqrt(math.e)

# MC stream keys; the basis position in the family is appended
KEY_EXPECTED = (0,)
KEY_FORMULA = 1
KEY_INDICATOR = 2


@dataclass(frozen=True)
class BoundConfig:
    beta: float = 1.0
    family: str = "deterministic-optimal"
    k: int = 1
    pb_variant: str = "rederived-power"
    pb_source: str = "formula-mc"
    mc_samples: int = 100_000
    seed: int = 1
    clamp_negative_pb: bool = True
    dfm_set_size: int | None = None
    chunk_size: int = 4096
    workers: int = 1

    def __post_init__(self):
        BetaCondition(self.beta)
        if self.family not in FAMILIES:
            raise StructuralError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.pb_variant not in PB_VARIANTS:
            raise StructuralError(f"pb_variant must be one of {PB_VARIANTS}, got {self.pb_variant!r}")
        if self.pb_source not in PB_SOURCES:
            raise StructuralError(f"pb_source must be one of {PB_SOURCES}, got {self.pb_source!r}")
        if self.k < 1:
            raise StructuralError("k must be >= 1")
        if self.mc_samples < 1:
            raise StructuralError("mc_samples must be >= 1")
        if self.dfm_set_size is not None and self.dfm_set_size < 1:
            raise StructuralError("dfm_set_size must be >= 1")
        SimConfig(self.mc_samples, self.seed, self.chunk_size, self.workers)

    def sim(self) -> SimConfig:
        return SimConfig(self.mc_samples, self.seed, self.chunk_size, self.workers)


def require_shapes(lp: LinearProgram) -> None:
    for j, c in enumerate(lp.cost_model):
        if isinstance(c, WeibullParams) and not 1 <= c.gamma <= 2:
            raise PreconditionError(f"column {j + 1}: shape gamma={c.gamma} outside [1, 2]")


def _column_draws(lp: LinearProgram, cols: Sequence[int], rng: np.random.Generator, count: int) -> np.ndarray:
    """Sample the listed columns' costs; deterministic columns are constant."""
    out = np.empty((count, len(cols)))
    u = open_uniforms(rng, (count, len(cols)))
    for r, j in enumerate(cols):
        c = lp.cost_model[j]
        if isinstance(c, WeibullParams):
            out[:, r] = c.eta * (-np.log(u[:, r])) ** (1 / c.gamma)
        else:
            out[:, r] = float(c)
    return out


def conditional_optimality(basis: Basis, c_basic: np.ndarray) -> np.ndarray:
    """``prod_i P(c_i >= h_i | c_B)`` per row of basic costs, ``h = c_B alpha``."""
    lp = basis.lp
    h = c_basic @ basis.alpha_array
    out = np.ones(c_basic.shape[0])
    for col, i in enumerate(basis.nonbasic):
        c = lp.cost_model[i]
        if isinstance(c, WeibullParams):
            out *= np.exp(-((np.maximum(h[:, col], 0.0) / c.eta) ** c.gamma))
        else:
            out *= h[:, col] <= float(c)
    return out


def pb_formula_mc(basis: Basis, n: int, seed: int, chunk_size: int = 4096, workers: int = 1,
                  key: Sequence[int] = (KEY_FORMULA,)) -> tuple[float, float]:
    """Conditional Monte Carlo estimate of ``p_B`` and its standard error."""
    if n < 1:
        raise StructuralError("need at least one sample")
    require_shapes(basis.lp)
    if not basis.feasible:
        raise PreconditionError(f"basis {basis.indices} is infeasible")

    def chunk(rng, count):
        return conditional_optimality(basis, _column_draws(basis.lp, basis.indices, rng, count))

    est, se, _ = run_chunked(chunk, n, seed, chunk_size, workers, key)
    return est, (0.0 if math.isnan(se) else se)


def reduced_costs(basis: Basis, costs: np.ndarray) -> np.ndarray:
    """Reduced costs ``c_{B^c} - c_B alpha`` per row of full cost vectors."""
    costs = np.atleast_2d(costs)
    return costs[:, list(basis.nonbasic)] - costs[:, list(basis.indices)] @ basis.alpha_array


def pb_indicator_mc(basis: Basis, n: int, seed: int, chunk_size: int = 4096, workers: int = 1,
                    key: Sequence[int] = (KEY_INDICATOR,)) -> tuple[float, float]:
    """Frequency with which ``basis`` is optimal (feasible and dual feasible)."""
    if n < 1:
        raise StructuralError("need at least one sample")
    require_shapes(basis.lp)
    if not basis.feasible:
        return 0.0, 0.0
    cols = range(basis.lp.n_cols)

    def chunk(rng, count):
        rc = reduced_costs(basis, _column_draws(basis.lp, cols, rng, count))
        return (rc >= 0).all(axis=1).astype(float)

    est, se, _ = run_chunked(chunk, n, seed, chunk_size, workers, key)
    return est, (0.0 if math.isnan(se) else se)


def _moments(c) -> tuple[float, float]:
    if isinstance(c, WeibullParams):
        return mean(c), second_moment(c)
    return float(c), float(c) ** 2


def pb_closed_form_lower(basis: Basis, variant: str = "rederived-power") -> float:
    """Raw closed-form lower bound on ``p_B`` (may be negative).

    Each non-basic random column ``i`` deducts ``(K sqrt(S2) + |S1|)`` over
    ``eta_i**gamma_i`` ("as-printed") or the same ratio with the bracket also
    divided by ``eta_i`` before raising to ``gamma_i`` ("rederived-power"),
    where ``S1 = sum_j alpha_ji E[c_j]``, ``S2 = sum_j alpha_ji**2 E[c_j**2]``
    and ``K = 4 sqrt(e)``.
    """
    if variant not in PB_VARIANTS:
        raise StructuralError(f"variant must be one of {PB_VARIANTS}")
    lp = basis.lp
    require_shapes(lp)
    alpha = basis.alpha_array
    mom = np.array([_moments(lp.cost_model[j]) for j in basis.indices]).reshape(-1, 2)
    deduction = 0.0
    for col, i in enumerate(basis.nonbasic):
        a = alpha[:, col]
        c = lp.cost_model[i]
        if isinstance(c, WeibullParams):
            s1 = float(a @ mom[:, 0])
            s2 = float((a**2) @ mom[:, 1])
            bracket = KHINTCHINE_AGGREGATE * math.sqrt(s2) + abs(s1)
            if variant == "as-printed":
                deduction += bracket / c.eta**c.gamma
            else:
                deduction += (bracket / c.eta) ** c.gamma
        else:
            # deterministic column: the factor is 1 a.s. when h_i <= c_i surely, else bounded by 0
            random_rows = [r for r, j in enumerate(basis.indices) if lp.is_random(j)]
            fixed = sum(float(a[r]) * float(lp.cost_model[j]) for r, j in enumerate(basis.indices)
                        if not lp.is_random(j))
            surely = all(a[r] <= 0 for r in random_rows) and fixed <= float(c)
            deduction += 0.0 if surely else 1.0
    return 1.0 - deduction


def _check_witness(lp: LinearProgram, family: Sequence[Basis], x: Sequence) -> tuple[Fraction, ...]:
    x = tuple(Fraction(v) for v in x)
    if not lp.is_feasible(x):
        raise PreconditionError("witness is not feasible")
    allowed = family_index_set(family)
    if any(v != 0 and j not in allowed for j, v in enumerate(x)):
        raise PreconditionError(f"witness is nonzero outside the admissible set {sorted(allowed)}")
    return x


def conservative_pb(estimate: float, stderr: float) -> float:
    return min(1.0, max(0.0, estimate - 2.0 * stderr))


def basis_contribution(basis: Basis, x: Sequence[Fraction]) -> float:
    """``E[c_B]^T x_B``."""
    mu = basis.lp.expected_costs
    return float(sum((mu[j] * Fraction(x[j]) for j in basis.indices), Fraction(0)))


def pb_hat(basis: Basis, cfg: BoundConfig, position: int = 0) -> float:
    """Probability used in the lower bound, per ``cfg.pb_source``."""
    if cfg.pb_source == "closed-form":
        raw = pb_closed_form_lower(basis, cfg.pb_variant)
        return max(0.0, raw) if cfg.clamp_negative_pb else raw
    est, se = pb_formula_mc(basis, cfg.mc_samples, cfg.seed, cfg.chunk_size, cfg.workers,
                            key=(KEY_FORMULA, position))
    return conservative_pb(est, se)


def expectation_lower_bound(lp: LinearProgram, family: Sequence[Basis], witness_x: Sequence,
                            cfg: BoundConfig, pb_values: Sequence[float] | None = None) -> float:
    """``(1/beta) sum_B p_B E[c_B]^T x_B`` over the family."""
    if not family:
        raise StructuralError("the basis family is empty")
    x = _check_witness(lp, family, witness_x)
    if pb_values is None:
        pb_values = [pb_hat(b, cfg, r) for r, b in enumerate(family)]
    if len(pb_values) != len(family):
        raise StructuralError("one probability per family member is required")
    total = math.fsum(p * basis_contribution(b, x) for p, b in zip(pb_values, family))
    return max(0.0, total) / cfg.beta


def dfm_terms(lp: LinearProgram, x: Sequence, set_size: int | None = None) -> Fraction:
    x = tuple(Fraction(v) for v in x)
    if not lp.is_feasible(x):
        raise PreconditionError("x is not feasible")
    size = lp.n_rows if set_size is None else set_size
    mu = lp.expected_costs
    terms = sorted(((mu[i] * x[i], -i) for i in range(lp.n_cols)), reverse=True)
    return sum((t for t, _ in terms[:size]), Fraction(0))


def dfm_upper_bound(lp: LinearProgram, x: Sequence, set_size: int | None = None) -> float:
    """Sum of the ``set_size`` largest ``E[c_i] x_i`` (default: number of rows)."""
    return float(dfm_terms(lp, x, set_size))


def deterministic_surrogate(lp: LinearProgram) -> DeterministicSolution:
    return solve_deterministic(lp, lp.expected_costs)


def trivial_upper_bound(lp: LinearProgram) -> float:
    """``zeta``: optimum of the LP with every cost replaced by its mean."""
    return float(deterministic_surrogate(lp).value)


def select_family(g: DegradationGraph, lp: LinearProgram, cfg: BoundConfig,
                  surrogate: DeterministicSolution | None = None) -> list[Basis]:
    if cfg.family == "deterministic-optimal":
        return [(surrogate or deterministic_surrogate(lp)).basis]
    mu = lp.expected_costs
    paths = sorted(enumerate_paths(g), key=lambda p: (sum(mu[e] for e in p.edges), p.edges))[:cfg.k]
    feasible = enumerate_bases(lp, feasible_only=True)
    family: list[Basis] = []
    for p in paths:
        target = tuple(Fraction(v) for v in p.x)
        b = next(b for b in feasible if b.x_full == target)
        if b not in family:
            family.append(b)
    return family


@dataclass
class BasisReport:
    basis: tuple[int, ...]
    path: tuple[int, ...] | None
    pb_closed_form_raw: float
    pb_closed_form_clamped: float
    pb_formula_mc: float
    pb_formula_mc_stderr: float
    pb_indicator_mc: float | None
    pb_indicator_mc_stderr: float | None
    pb_used: float
    contribution: float | None


@dataclass
class BoundReport:
    config: dict
    graph: dict
    zeta: float
    dfm_bound: float
    dfm_set_size: int
    expectation_lower_bound: float | None
    lower_bound_by_source: dict
    lower_bound_status: str
    beta_condition_holds: bool
    mc_mean: float | None
    mc_stderr: float | None
    mc_ci95: tuple[float, float] | None
    mc_samples: int | None
    per_basis: list[BasisReport] = field(default_factory=list)
    witness_x: tuple[float, ...] | None = ()
    family: list[tuple[int, ...]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "graph": self.graph,
            "column_indexing": "1-based; column m+1 is the extended all-ones column",
            "zeta": self.zeta,
            "dfm_bound": self.dfm_bound,
            "dfm_set_size": self.dfm_set_size,
            "expectation_lower_bound": self.expectation_lower_bound,
            "lower_bound_by_source": self.lower_bound_by_source,
            "lower_bound_status": self.lower_bound_status,
            "beta_condition_holds": self.beta_condition_holds,
            "mc_mean": self.mc_mean,
            "mc_stderr": self.mc_stderr,
            "mc_ci95": list(self.mc_ci95) if self.mc_ci95 else None,
            "mc_samples": self.mc_samples,
            "family": [list(b) for b in self.family],
            "witness_x": list(self.witness_x) if self.witness_x is not None else None,
            "per_basis": [
                {
                    "basis": list(r.basis),
                    "path": list(r.path) if r.path else None,
                    "pb_closed_form_raw": r.pb_closed_form_raw,
                    "pb_closed_form_clamped": r.pb_closed_form_clamped,
                    "pb_formula_mc": r.pb_formula_mc,
                    "pb_formula_mc_stderr": r.pb_formula_mc_stderr,
                    "pb_indicator_mc": r.pb_indicator_mc,
                    "pb_indicator_mc_stderr": r.pb_indicator_mc_stderr,
                    "pb_used": r.pb_used,
                    "contribution": r.contribution,
                }
                for r in self.per_basis
            ],
        }


def _path_nodes(g: DegradationGraph, x: Sequence[Fraction]) -> tuple[int, ...] | None:
    """Node sequence if ``x`` is a 0/1 path vector, else None."""
    if any(v not in (0, 1) for v in x) or x[-1] != 0:
        return None
    nxt = {g.edges[e][0]: g.edges[e][1] for e in range(g.edge_count) if x[e] == 1}
    nodes, v = [g.source], g.source
    while v in nxt and len(nodes) <= g.node_count:
        v = nxt[v]
        nodes.append(v)
    return tuple(nodes) if v == g.sink and len(nodes) == sum(1 for e in x[:-1] if e == 1) + 1 else None


def build_report(g: DegradationGraph, cfg: BoundConfig, include_mc: bool = True) -> BoundReport:
    """All bounds for one graph; deterministic given ``(g, cfg)``."""
    lp = lp_from_graph(g)
    require_shapes(lp)
    surrogate = deterministic_surrogate(lp)
    family = select_family(g, lp, cfg, surrogate)
    paths = enumerate_paths(g)
    try:
        witness = admissible_witness(lp, family, [p.x for p in paths])
        status = "ok"
    except WitnessUnavailable as exc:
        # the caller may shrink the family; every lower-bound number is reported as unavailable
        witness, status = None, f"unavailable: {exc}"
    set_size = cfg.dfm_set_size or lp.n_rows
    dfm = dfm_upper_bound(lp, surrogate.x, set_size)

    beta_ok = all(
        verify_beta_condition(p, cfg.beta, np.linspace(0.0, 10.0 * p.eta, 200))
        for p in sorted(set(g.params), key=lambda p: (p.eta, p.gamma))
    )

    rows, pb_closed, pb_mc = [], [], []
    for r, b in enumerate(family):
        raw = pb_closed_form_lower(b, cfg.pb_variant)
        clamped = max(0.0, raw) if cfg.clamp_negative_pb else raw
        est, se = pb_formula_mc(b, cfg.mc_samples, cfg.seed, cfg.chunk_size, cfg.workers, key=(KEY_FORMULA, r))
        ind = ind_se = None
        if include_mc:
            ind, ind_se = pb_indicator_mc(b, cfg.mc_samples, cfg.seed, cfg.chunk_size, cfg.workers,
                                          key=(KEY_INDICATOR, r))
        pb_closed.append(clamped)
        pb_mc.append(conservative_pb(est, se))
        used = pb_closed[-1] if cfg.pb_source == "closed-form" else pb_mc[-1]
        rows.append(BasisReport(
            tuple(j + 1 for j in b.indices), _path_nodes(g, b.x_full), raw, clamped, est, se, ind, ind_se,
            used, None if witness is None else basis_contribution(b, witness),
        ))

    by_source = {
        src: None if witness is None else expectation_lower_bound(lp, family, witness, cfg, pbs)
        for src, pbs in (("closed-form", pb_closed), ("formula-mc", pb_mc))
    }

    mc = estimate_expected_shortest(g, cfg.sim(), key=KEY_EXPECTED) if include_mc else None
    config = {
        "beta": cfg.beta, "family": cfg.family, "k": cfg.k, "pb_variant": cfg.pb_variant,
        "pb_source": cfg.pb_source, "samples": cfg.mc_samples, "seed": cfg.seed,
        "clamp_negative_pb": cfg.clamp_negative_pb, "dfm_set_size": set_size, "chunk_size": cfg.chunk_size,
        "rng": "PCG64 via SeedSequence(seed, spawn_key=(stream..., chunk))",
    }
    graph = {
        "nodes": g.node_count,
        "edges": [{"tail": t, "head": h, "eta": p.eta, "gamma": p.gamma} for (t, h), p in zip(g.edges, g.params)],
    }
    return BoundReport(
        config=config,
        graph=graph,
        zeta=float(surrogate.value),
        dfm_bound=dfm,
        dfm_set_size=set_size,
        expectation_lower_bound=by_source[cfg.pb_source],
        lower_bound_by_source=by_source,
        lower_bound_status=status,
        beta_condition_holds=beta_ok,
        mc_mean=mc.mean if mc else None,
        mc_stderr=mc.stderr if mc else None,
        mc_ci95=mc.ci95 if mc else None,
        mc_samples=mc.samples if mc else None,
        per_basis=rows,
        witness_x=None if witness is None else tuple(float(v) for v in witness),
        family=[tuple(j + 1 for j in b.indices) for b in family],
    )
