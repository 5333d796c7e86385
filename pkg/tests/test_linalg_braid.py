"""Exact linear algebra and braided integers, against classical oracles."""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qjet.braid import BraidOperator, IndexOutOfRange, NonSplitCharPoly
from qjet.linalg import kernel, rank, solve
from qjet.scalars import ScalarField

from conftest import load

Q = ScalarField(1)
small = st.integers(-3, 3)


@st.composite
def matrices(draw):
    r = draw(st.integers(1, 5))
    c = draw(st.integers(1, 5))
    return [[draw(small) for _ in range(c)] for _ in range(r)]


def _rows(mat):
    return [{j: Q.const(v) for j, v in enumerate(row) if v} for row in mat]


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_and_kernel_match_sympy(mat):
    cols = list(range(len(mat[0])))
    assert rank(_rows(mat)) == sympy.Matrix(mat).rank()
    ker = kernel(_rows(mat), cols)
    assert len(ker) == len(cols) - sympy.Matrix(mat).rank()
    for v in ker:
        for row in mat:
            assert sum((Q.const(row[j]) * v.get(j, Q.zero) for j in cols), Q.zero).is_zero()


@settings(max_examples=80, deadline=None)
@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_is_consistent_with_sympy(mat, b):
    b = b[:len(mat)]
    sol = solve(_rows(mat), [Q.const(x) for x in b])
    M = sympy.Matrix(mat)
    solvable = M.rank() == M.row_join(sympy.Matrix(b)).rank()
    assert (sol is not None) == solvable
    if sol is not None:
        for row, rhs in zip(mat, b):
            assert sum((Q.const(row[j]) * sol.get(j, Q.zero) for j in range(len(row))), Q.zero) == rhs


def _flip(letters, sign=1):
    table = {(x, y): {(y, x): Q.const(sign)} for x in letters for y in letters}
    return BraidOperator.from_table(Q, letters, table)


def _shuffles(word, k, sign):
    """Signed interleavings of word[:n-k] with the last k letters (classical braided binomial)."""
    n = len(word)
    out = {}
    for pos in itertools.combinations(range(n), k):
        rest = [p for p in range(n) if p not in pos]
        w = [None] * n
        for p, x in zip(pos, word[n - k:]):
            w[p] = x
        for p, x in zip(rest, word[:n - k]):
            w[p] = x
        crossings = sum(1 for p in pos for r in rest if r > p)
        c = sign ** crossings
        out[tuple(w)] = out.get(tuple(w), 0) + c
    return {w: c for w, c in out.items() if c}


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_flip_binomials_are_shuffle_sums(sign, n):
    b = _flip([0, 1, 2], sign)
    for k in range(n + 1):
        m = b.binomial(n, k)
        for w in b.words(n):
            got = {u: c.as_fraction() for u, c in m.row(w).items() if not c.is_zero()}
            assert got == {u: Fraction(c) for u, c in _shuffles(w, k, sign).items()}


@pytest.mark.parametrize("d,n", [(2, 2), (2, 3), (3, 2), (3, 3), (3, 4)])
def test_symmetrizer_ranks(d, n):
    sym, alt = _flip(list(range(d)), 1), _flip(list(range(d)), -1)
    assert sym.image_rank(sym.factorial(n), n) == comb(d + n - 1, n)
    assert alt.image_rank(alt.factorial(n), n) == comb(d, n)


def test_binomial_index_range():
    b = _flip([0, 1])
    with pytest.raises(IndexOutOfRange):
        b.binomial(2, 3)
    with pytest.raises(IndexOutOfRange):
        b.factorial(0)


@pytest.mark.parametrize("key", ["m2", "cqsl2_plus", "bicross_prop_i", "grassmann_3"])
def test_through_crossing_lemma(key):
    b = load(key).conn.braid
    for n in range(2, 5):
        for k in range(1, n + 1):
            for m in range(1, k + 1):
                r = b.check_through_crossing(n, k, m)
                assert r.ok, r.witness


def test_eigenvalues_of_flip():
    roots = {r.as_fraction(): m for r, m in _flip([0, 1, 2]).eigen_structure()}
    assert roots == {1: 6, -1: 3}


def test_non_split_characteristic_polynomial_is_reported():
    # rotation-like braiding: x^2 + 1 has no root in Q
    table = {(0, 0): {(0, 0): Q.one}, (1, 1): {(1, 1): Q.one},
             (0, 1): {(1, 0): Q.one}, (1, 0): {(0, 1): -Q.one}}
    b = BraidOperator.from_table(Q, [0, 1], table)
    with pytest.raises(NonSplitCharPoly):
        b.eigen_structure()
