"""Random linear programs ``min c^T x  s.t.  A x = b, x >= 0`` and their bases.

A basis ``B`` is a set of ``m`` column indices with ``A_B`` invertible.  Its
coefficient matrix ``alpha = A_B^{-1} A_{B^c}`` expresses every non-basic
column in the basic ones; row ``j`` of ``alpha`` belongs to the ``j``-th basic
column and column ``i`` to the ``i``-th non-basic column.

All basis algebra is exact.  Enumeration screens every ``m``-subset with one
vectorised fraction-free elimination (:func:`batch_gauss_jordan`) and only
materialises rational inverses on demand.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InfeasibleError, PreconditionError, ResourceLimitError, StructuralError
from .exact_linalg import RationalMatrix, as_vector, batch_gauss_jordan, inverse, rank, solve
from .weibull import WeibullParams, mean as weibull_mean

DEFAULT_BASIS_CAP = 10**6
_BLOCK = 20000

ColumnCost = Union[WeibullParams, Fraction]


class WitnessUnavailable(InfeasibleError):
    """No feasible vector is supported on the family's admissible index set."""


@dataclass(frozen=True)
class LinearProgram:
    """``A`` with full row rank, right-hand side ``b`` and a per-column cost model.

    ``cost_model[j]`` is either :class:`WeibullParams` (random cost) or a
    number (deterministic cost, e.g. 0 for the extended column).
    """

    a: RationalMatrix
    b: tuple[Fraction, ...]
    cost_model: tuple[ColumnCost, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", as_vector(self.b))
        model = tuple(c if isinstance(c, WeibullParams) else Fraction(c) for c in self.cost_model)
        object.__setattr__(self, "cost_model", model)
        if len(self.b) != self.a.nrows:
            raise StructuralError(f"b has length {len(self.b)}, A has {self.a.nrows} rows")
        if len(model) != self.a.ncols:
            raise StructuralError(f"cost model has {len(model)} entries, A has {self.a.ncols} columns")
        if self.a.nrows > self.a.ncols or rank(self.a) != self.a.nrows:
            raise StructuralError("A must have full row rank")

    @property
    def n_rows(self) -> int:
        return self.a.nrows

    @property
    def n_cols(self) -> int:
        return self.a.ncols

    def is_random(self, j: int) -> bool:
        return isinstance(self.cost_model[j], WeibullParams)

    @cached_property
    def expected_costs(self) -> tuple[Fraction, ...]:
        """Exact rational images of the column means (floats convert exactly)."""
        return tuple(Fraction(weibull_mean(c)) if isinstance(c, WeibullParams) else c for c in self.cost_model)

    @cached_property
    def _int_system(self) -> tuple[np.ndarray, np.ndarray]:
        rows = []
        for row, bi in zip(self.a.rows, self.b):
            scale = math.lcm(*(v.denominator for v in row), bi.denominator)
            rows.append([int(v * scale) for v in row] + [int(bi * scale)])
        arr = np.array(rows, dtype=object)
        try:
            arr = arr.astype(np.int64)
        except OverflowError:
            pass
        return arr[:, :-1], arr[:, -1]

    def is_feasible(self, x: Sequence) -> bool:
        x = as_vector(x)
        return len(x) == self.n_cols and all(v >= 0 for v in x) and self.a @ x == self.b


@dataclass(frozen=True, eq=False)
class Basis:
    lp: LinearProgram = field(repr=False)
    indices: tuple[int, ...]
    x_basic: tuple[Fraction, ...]

    @cached_property
    def nonbasic(self) -> tuple[int, ...]:
        chosen = set(self.indices)
        return tuple(j for j in range(self.lp.n_cols) if j not in chosen)

    @property
    def feasible(self) -> bool:
        return all(v >= 0 for v in self.x_basic)

    @cached_property
    def matrix(self) -> RationalMatrix:
        return self.lp.a.columns(self.indices)

    @cached_property
    def inv(self) -> RationalMatrix:
        return inverse(self.matrix)

    @cached_property
    def alpha(self) -> RationalMatrix:
        return self.inv @ self.lp.a.columns(self.nonbasic)

    @cached_property
    def alpha_array(self) -> np.ndarray:
        return self.alpha.to_numpy().reshape(len(self.indices), len(self.nonbasic))

    @cached_property
    def x_full(self) -> tuple[Fraction, ...]:
        x = [Fraction(0)] * self.lp.n_cols
        for j, v in zip(self.indices, self.x_basic):
            x[j] = v
        return tuple(x)

    def __eq__(self, other):
        return isinstance(other, Basis) and self.lp == other.lp and self.indices == other.indices

    def __hash__(self):
        return hash(self.indices)


def make_basis(lp: LinearProgram, indices: Iterable[int]) -> Basis:
    """Exact basis for an explicit column set (raises if ``A_B`` is singular)."""
    idx = tuple(sorted(indices))
    if len(idx) != lp.n_rows or len(set(idx)) != len(idx) or not all(0 <= j < lp.n_cols for j in idx):
        raise StructuralError(f"a basis needs {lp.n_rows} distinct column indices, got {idx}")
    return Basis(lp, idx, solve(lp.a.columns(idx), lp.b))


def _screen(lp: LinearProgram, cap: int):
    """Yield (subsets, pivot, numer) blocks for every nonsingular m-subset."""
    m, nc = lp.n_rows, lp.n_cols
    total = math.comb(nc, m)
    if total > cap:
        raise ResourceLimitError(f"C({nc},{m}) = {total} column subsets exceed the cap {cap}")
    a_int, b_int = lp._int_system
    combos = itertools.combinations(range(nc), m)
    while True:
        block = np.array(list(itertools.islice(combos, _BLOCK)), dtype=np.intp).reshape(-1, m)
        if len(block) == 0:
            return
        mats = np.transpose(a_int[:, block], (1, 0, 2))
        rhs = np.broadcast_to(b_int[None, :, None], (len(block), m, 1))
        det, pivot, numer = batch_gauss_jordan(mats, rhs)
        ok = det != 0
        yield block[ok], pivot[ok], numer[ok, :, 0]


def _feasible_mask(pivot: np.ndarray, numer: np.ndarray) -> np.ndarray:
    sgn = np.where(pivot > 0, 1, -1)
    return (numer * sgn[:, None] >= 0).all(axis=1)


def _materialise(lp: LinearProgram, subset, pivot, numer) -> Basis:
    d = int(pivot)
    return Basis(lp, tuple(int(j) for j in subset), tuple(Fraction(int(v), d) for v in numer))


def enumerate_bases(lp: LinearProgram, feasible_only: bool = False, cap: int = DEFAULT_BASIS_CAP) -> list[Basis]:
    """All bases in lexicographic order of their sorted index sets."""
    out = []
    for subsets, pivot, numer in _screen(lp, cap):
        if feasible_only:
            keep = _feasible_mask(pivot, numer)
            subsets, pivot, numer = subsets[keep], pivot[keep], numer[keep]
        out.extend(_materialise(lp, s, p, x) for s, p, x in zip(subsets, pivot, numer))
    return out


def _as_costs(lp: LinearProgram, costs: Sequence) -> tuple[Fraction, ...]:
    c = tuple(Fraction(v) for v in costs)
    if len(c) != lp.n_cols:
        raise StructuralError(f"cost vector has length {len(c)}, expected {lp.n_cols}")
    return c


def reduced_cost_condition(basis: Basis, c: Sequence) -> bool:
    """Necessary optimality test ``c_i >= sum_j c_j alpha_ji`` for every non-basic ``i``."""
    c = _as_costs(basis.lp, c)
    if any(v < 0 for v in c):
        raise PreconditionError("costs must be nonnegative")
    cb = [c[j] for j in basis.indices]
    alpha = basis.alpha
    for col, i in enumerate(basis.nonbasic):
        if c[i] < sum((cb[r] * alpha[r, col] for r in range(len(cb))), Fraction(0)):
            return False
    return True


@dataclass(frozen=True)
class DeterministicSolution:
    value: Fraction
    basis: Basis
    x: tuple[Fraction, ...]


def solve_deterministic(lp: LinearProgram, costs: Sequence, cap: int = DEFAULT_BASIS_CAP) -> DeterministicSolution:
    """Exact LP optimum by exhaustive feasible-basis enumeration.

    Ties go to the lexicographically smallest basis index set.
    """
    c = _as_costs(lp, costs)
    if any(v < 0 for v in c):
        raise PreconditionError("costs must be nonnegative")
    cf = np.array([float(v) for v in c])
    best = None
    for subsets, pivot, numer in _screen(lp, cap):
        keep = _feasible_mask(pivot, numer)
        if not keep.any():
            continue
        subsets, pivot, numer = subsets[keep], pivot[keep], numer[keep]
        approx = (cf[subsets] * numer.astype(float)).sum(axis=1) / pivot.astype(float)
        lo = approx.min()
        near = np.flatnonzero(approx <= lo + 1e-9 * (1.0 + abs(lo)))
        for k in near:
            d = int(pivot[k])
            val = sum((c[int(j)] * Fraction(int(v), d) for j, v in zip(subsets[k], numer[k])), Fraction(0))
            if best is None or val < best[0]:
                best = (val, subsets[k], pivot[k], numer[k])
    if best is None:
        raise InfeasibleError("the linear program has no feasible basis")
    basis = _materialise(lp, best[1], best[2], best[3])
    return DeterministicSolution(best[0], basis, basis.x_full)


def index_set(basis: Basis) -> frozenset[int]:
    """``B`` plus every non-basic column whose alpha column is nonnegative."""
    alpha = basis.alpha
    keep = set(basis.indices)
    for col, i in enumerate(basis.nonbasic):
        if all(alpha[r, col] >= 0 for r in range(alpha.nrows)):
            keep.add(i)
    return frozenset(keep)


def family_index_set(family: Sequence[Basis]) -> frozenset[int]:
    if not family:
        raise StructuralError("the basis family is empty")
    return frozenset.intersection(*(index_set(b) for b in family))


def witness_score(lp: LinearProgram, family: Sequence[Basis], x: Sequence[Fraction]) -> Fraction:
    """``sum over B in family of E[c_B]^T x_B``: the probability-free part of the lower bound."""
    mu = lp.expected_costs
    return sum((mu[j] * x[j] for b in family for j in b.indices), Fraction(0))


def admissible_witness(lp: LinearProgram, family: Sequence[Basis],
                       candidates: Iterable[Sequence] = ()) -> tuple[Fraction, ...]:
    """Feasible ``x`` vanishing outside the family's admissible index set.

    Candidates are the family's basic solutions followed by ``candidates``
    (e.g. enumerated path vectors).  Among admissible ones the largest
    :func:`witness_score` wins, then the largest ``E[c]^T x``, then the first seen.
    """
    allowed = family_index_set(family)
    mu = lp.expected_costs
    pool = [b.x_full for b in family] + [as_vector(x) for x in candidates]
    best, best_key = None, None
    for x in pool:
        if len(x) != lp.n_cols:
            raise StructuralError(f"candidate has length {len(x)}, expected {lp.n_cols}")
        if any(v != 0 for j, v in enumerate(x) if j not in allowed):
            continue
        if not lp.is_feasible(x):
            continue
        key = (witness_score(lp, family, x), sum((m * v for m, v in zip(mu, x)), Fraction(0)))
        if best_key is None or key > best_key:
            best, best_key = x, key
    if best is None:
        raise WitnessUnavailable(f"no feasible candidate is supported on the admissible set {sorted(allowed)}")
    return best
