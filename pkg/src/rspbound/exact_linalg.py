"""Exact rational linear algebra for small dense matrices.

Everything here is tolerance-free: entries are :class:`fractions.Fraction`
and elimination is fraction-free (Bareiss for rank/determinant, the
Gauss-Jordan variant for solves and inverses), so intermediate values stay
integral and every division is exact.

:func:`batch_gauss_jordan` runs the same fraction-free Gauss-Jordan sweep on a
stack of integer matrices with numpy, which is what makes exhaustive basis
enumeration affordable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ResourceLimitError, SingularMatrixError, StructuralError

RationalVector = tuple  # tuple[Fraction, ...]


@dataclass(frozen=True)
class RationalMatrix:
    """Immutable dense matrix of exact rationals."""

    rows: tuple[tuple[Fraction, ...], ...]
    ncols: int

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> RationalMatrix:
        data = tuple(tuple(Fraction(v) for v in row) for row in rows)
        widths = {len(r) for r in data}
        if len(widths) > 1:
            raise StructuralError(f"ragged rows: widths {sorted(widths)}")
        return cls(data, widths.pop() if widths else 0)

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> RationalMatrix:
        return cls.from_rows([[0] * ncols for _ in range(nrows)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> RationalVector:
        return tuple(row[j] for row in self.rows)

    def columns(self, idx: Sequence[int]) -> RationalMatrix:
        """Submatrix made of the listed columns, in the given order."""
        return RationalMatrix(tuple(tuple(row[j] for j in idx) for row in self.rows), len(idx))

    def transpose(self) -> RationalMatrix:
        return RationalMatrix(tuple(zip(*self.rows)) if self.rows else (), self.nrows)

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.ncols != other.nrows:
                raise StructuralError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.transpose().rows
            return RationalMatrix(
                tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.rows),
                other.ncols,
            )
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise StructuralError(f"shape mismatch {self.shape} @ vector of length {len(vec)}")
        return tuple(sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in self.rows)

    def to_numpy(self, dtype=float) -> np.ndarray:
        return np.array([[dtype(v) for v in row] for row in self.rows], dtype=dtype).reshape(self.shape)

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for row in self.rows for v in row)


def as_vector(values: Iterable) -> RationalVector:
    return tuple(Fraction(v) for v in values)


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators; row scaling keeps rank and solutions."""
    out = []
    for row in rows:
        scale = math.lcm(*(v.denominator for v in row)) if row else 1
        out.append([int(v * scale) for v in row])
    return out


def rank(m: RationalMatrix) -> int:
    rows = _integer_rows(m.rows)
    nrows, ncols = m.shape
    r, prev = 0, 1
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            f = rows[i][c]
            rows[i] = [(piv * rows[i][j] - f * rows[r][j]) // prev for j in range(ncols)]
        prev = piv
        r += 1
    return r


def det(m: RationalMatrix) -> Fraction:
    n = m.nrows
    if m.ncols != n:
        raise StructuralError(f"determinant of non-square matrix {m.shape}")
    if n == 0:
        return Fraction(1)
    scales = [math.lcm(*(v.denominator for v in row)) for row in m.rows]
    rows = [[int(v * s) for v in row] for row, s in zip(m.rows, scales)]
    sign, prev = 1, 1
    for k in range(n - 1):
        p = next((i for i in range(k, n) if rows[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            rows[k], rows[p] = rows[p], rows[k]
            sign = -sign
        piv = rows[k][k]
        for i in range(k + 1, n):
            f = rows[i][k]
            rows[i] = [(piv * rows[i][j] - f * rows[k][j]) // prev for j in range(n)]
        prev = piv
    return Fraction(sign * rows[n - 1][n - 1], math.prod(scales))


def _gauss_jordan(m: RationalMatrix, rhs_rows: Sequence[Sequence[Fraction]]) -> tuple[int, list[list[int]]]:
    """Fraction-free Gauss-Jordan on ``[m | rhs]``; returns (d, N) with solution N / d."""
    n = m.nrows
    if m.ncols != n:
        raise StructuralError(f"expected a square matrix, got {m.shape}")
    rows = _integer_rows([list(a) + list(b) for a, b in zip(m.rows, rhs_rows)])
    width = len(rows[0]) if rows else 0
    prev = 1
    for k in range(n):
        p = next((i for i in range(k, n) if rows[i][k] != 0), None)
        if p is None:
            raise SingularMatrixError(f"no nonzero pivot in column {k} (rank < {n})")
        rows[k], rows[p] = rows[p], rows[k]
        piv = rows[k][k]
        for i in range(n):
            if i == k:
                continue
            f = rows[i][k]
            rows[i] = [(piv * rows[i][j] - f * rows[k][j]) // prev for j in range(width)]
        prev = piv
    return prev, [row[n:] for row in rows]


def solve(m: RationalMatrix, v: Sequence) -> RationalVector:
    """Exact solution of ``m x = v``."""
    vec = as_vector(v)
    if len(vec) != m.nrows:
        raise StructuralError(f"rhs length {len(vec)} does not match {m.shape}")
    d, numer = _gauss_jordan(m, [[x] for x in vec])
    return tuple(Fraction(row[0], d) for row in numer)


def inverse(m: RationalMatrix) -> RationalMatrix:
    n = m.nrows
    eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    d, numer = _gauss_jordan(m, eye)
    return RationalMatrix(tuple(tuple(Fraction(x, d) for x in row) for row in numer), n)


def _hadamard_fits_int64(mats: np.ndarray, rhs: np.ndarray) -> bool:
    # every intermediate is a minor (or a product of two minors) of [M | rhs]
    aug = np.concatenate([mats, rhs], axis=2).astype(float)
    norms = np.sort(np.sqrt((aug**2).sum(axis=1)), axis=1)[:, ::-1]
    n = mats.shape[1]
    top = np.maximum(norms[:, :n], 1.0)
    log2_bound = np.log2(top).sum(axis=1).max(initial=0.0)
    return 2 * log2_bound + 2 < 62


def batch_gauss_jordan(mats: np.ndarray, rhs: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fraction-free Gauss-Jordan on a stack of integer systems.

    Parameters
    ----------
    mats : (k, n, n) integer array
    rhs : (k, n, r) integer array, optional

    Returns
    -------
    det : (k,) exact determinants (0 for singular systems)
    pivot : (k,) final pivot ``d``; every solution is ``numer / d``
    numer : (k, n, r) exact numerators; meaningless where ``det == 0``

    int64 is used when a Hadamard bound proves no overflow, otherwise Python
    integers (object dtype).
    """
    mats = np.asarray(mats)
    k, n, n2 = mats.shape
    if n != n2:
        raise StructuralError(f"expected square systems, got {mats.shape}")
    if rhs is None:
        rhs = np.zeros((k, n, 0), dtype=np.int64)
    rhs = np.asarray(rhs)
    if not (np.issubdtype(mats.dtype, np.integer) or mats.dtype == object):
        raise StructuralError("batch_gauss_jordan needs integer matrices")
    dtype = np.int64 if (k == 0 or _hadamard_fits_int64(mats, rhs)) else object
    M = np.concatenate([mats, rhs], axis=2).astype(dtype)
    one = np.ones(k, dtype=dtype)
    prev = one.copy()
    sign = np.ones(k, dtype=np.int64)
    singular = np.zeros(k, dtype=bool)
    idx = np.arange(k)
    for col in range(n):
        nz = M[:, col:, col] != 0
        has = nz.any(axis=1)
        newly = ~has & ~singular
        if newly.any():
            singular |= newly
            M[newly] = 0
            prev[newly] = 1
        piv_row = col + np.argmax(nz, axis=1)
        swap = has & (piv_row != col)
        if swap.any():
            s = idx[swap]
            tmp = M[s, col, :].copy()
            M[s, col, :] = M[s, piv_row[swap], :]
            M[s, piv_row[swap], :] = tmp
            sign[swap] *= -1
        piv = np.where(has, M[:, col, col], one)
        pivot_row = M[:, col, :].copy()
        factor = M[:, :, col].copy()
        M = (piv[:, None, None] * M - factor[:, :, None] * pivot_row[:, None, :]) // prev[:, None, None]
        M[:, col, :] = pivot_row
        prev = piv
    pivot = np.where(singular, 0, prev) if n else one
    det = np.where(singular, 0, sign * pivot) if n else one
    return det, pivot, M[:, :, n:]


def is_totally_unimodular(m: RationalMatrix, max_order: int = 7, block: int = 20000) -> bool:
    """Exhaustive check that every square submatrix has determinant in {-1, 0, 1}."""
    if not m.is_integral():
        raise StructuralError("total unimodularity is defined for integer matrices")
    nrows, ncols = m.shape
    order = min(nrows, ncols)
    if order > max_order:
        raise ResourceLimitError(f"square submatrices up to order {order} exceed the cap max_order={max_order}")
    a = np.array([[int(v) for v in row] for row in m.rows], dtype=np.int64).reshape(m.shape)
    if np.any(np.abs(a) > 1):
        return False
    for k in range(2, order + 1):
        col_sets = np.array(list(itertools.combinations(range(ncols), k)), dtype=np.intp)
        for rs in itertools.combinations(range(nrows), k):
            sub = a[list(rs)]
            for start in range(0, len(col_sets), block):
                cs = col_sets[start:start + block]
                mats = np.transpose(sub[:, cs], (1, 0, 2))
                d, _, _ = batch_gauss_jordan(mats)
                if np.any(np.abs(d) > 1):
                    return False
    return True
