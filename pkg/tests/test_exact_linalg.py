import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIG1_A, FIG1_A0
from rspbound.errors import ResourceLimitError, SingularMatrixError, StructuralError
from rspbound.exact_linalg import (RationalMatrix, batch_gauss_jordan, det, inverse, is_totally_unimodular,
                                   rank, solve)

R = RationalMatrix.from_rows


def small_ints(n):
    return st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n)


def test_rank_examples():
    assert rank(R(FIG1_A)) == 5
    assert rank(R(FIG1_A0)) == 4
    assert rank(RationalMatrix.zeros(3, 4)) == 0
    assert rank(RationalMatrix.identity(4)) == 4


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(st.just(n), st.lists(
    st.lists(st.integers(-3, 3), min_size=n + 1, max_size=n + 1), min_size=n, max_size=n))))
@settings(max_examples=60, deadline=None)
def test_rank_matches_sympy(case):
    _, rows = case
    assert rank(R(rows)) == sympy.Matrix(rows).rank()


def test_inverse_examples():
    assert inverse(RationalMatrix.identity(3)) == RationalMatrix.identity(3)
    assert inverse(R([[-1, 1], [1, 1]])) == R([[Fraction(-1, 2), Fraction(1, 2)], [Fraction(1, 2), Fraction(1, 2)]])


def test_inverse_of_every_fig1_basis_submatrix():
    a = R(FIG1_A)
    eye = RationalMatrix.identity(5)
    seen = 0
    for cols in itertools.combinations(range(8), 5):
        sub = a.columns(cols)
        if sympy.Matrix([[int(v) for v in r] for r in sub.rows]).det() == 0:
            with pytest.raises(SingularMatrixError):
                inverse(sub)
            continue
        seen += 1
        assert sub @ inverse(sub) == eye
        assert inverse(sub) @ sub == eye
    assert seen == 21


def test_singular_raises_naming_pivot():
    with pytest.raises(SingularMatrixError, match="pivot in column 1"):
        inverse(R([[1, 2], [2, 4]]))


def test_solve_examples():
    assert solve(RationalMatrix.identity(3), [1, 2, 3]) == (1, 2, 3)
    assert solve(R([[2, 0], [0, 4]]), [1, 1]) == (Fraction(1, 2), Fraction(1, 4))
    with pytest.raises(StructuralError):
        solve(RationalMatrix.identity(2), [1, 2, 3])


def test_solve_residual_random_6x6():
    rng = np.random.default_rng(11)
    done = 0
    while done < 100:
        rows = rng.integers(-5, 6, size=(6, 6)).tolist()
        m = R(rows)
        if det(m) == 0:
            continue
        v = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(-9, 10, 6), rng.integers(1, 7, 6))]
        x = solve(m, v)
        assert m @ x == tuple(v)
        done += 1


@given(small_ints(4), st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=9), min_size=4, max_size=4))
@settings(max_examples=80, deadline=None)
def test_solve_roundtrip(rows, x):
    m = R(rows)
    if det(m) == 0:
        return
    assert solve(m, m @ x) == tuple(x)


@given(small_ints(4))
@settings(max_examples=80, deadline=None)
def test_inverse_involution_and_det(rows):
    m = R(rows)
    d = det(m)
    assert d == sympy.Matrix(rows).det()
    if d != 0:
        assert inverse(inverse(m)) == m


def test_det_with_fractions():
    m = R([[Fraction(1, 2), 1], [Fraction(1, 3), Fraction(5, 7)]])
    assert det(m) == Fraction(1, 2) * Fraction(5, 7) - Fraction(1, 3)


def test_batch_gauss_jordan_matches_exact():
    rng = np.random.default_rng(3)
    mats = rng.integers(-3, 4, size=(300, 5, 5))
    rhs = rng.integers(-3, 4, size=(300, 5, 1))
    d, piv, numer = batch_gauss_jordan(mats, rhs)
    for k in range(300):
        m = R(mats[k].tolist())
        assert d[k] == det(m)
        if d[k] != 0:
            assert tuple(Fraction(int(v), int(piv[k])) for v in numer[k, :, 0]) == solve(m, rhs[k, :, 0].tolist())


def test_batch_gauss_jordan_object_fallback():
    mats = np.array([[[10**12, 1], [3, 10**12]]], dtype=object)
    d, _, _ = batch_gauss_jordan(mats)
    assert d[0] == 10**24 - 3


def test_totally_unimodular():
    assert is_totally_unimodular(R(FIG1_A0))
    assert not is_totally_unimodular(R([[2]]))
    assert not is_totally_unimodular(R([[1, 1], [-1, 1]]))
    with pytest.raises(ResourceLimitError):
        is_totally_unimodular(RationalMatrix.identity(8))
    with pytest.raises(StructuralError):
        is_totally_unimodular(R([[Fraction(1, 2)]]))


def test_extended_basis_determinants_stay_small():
    a = R(FIG1_A)
    for cols in itertools.combinations(range(8), 5):
        assert abs(det(a.columns(cols))) <= 5
    for cols in itertools.combinations(range(7), 5):
        assert det(a.columns(cols)) in (-1, 0, 1)
