"""Exact linear algebra over prime fields: oracle cases and properties."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from localduality.exactla import (GF, SparseMatrix, kernel_basis,
                                  quotient_projection, rank, rref, solve,
                                  solve_matrix)


def dense(field, rows):
    ent = {(i, j): v for i, row in enumerate(rows)
           for j, v in enumerate(row) if v}
    cols = len(rows[0]) if rows else 0
    return SparseMatrix(field, len(rows), cols, ent)


def matrices(p=2, max_dim=5):
    @st.composite
    def build(draw):
        f = GF(p)
        r = draw(st.integers(0, max_dim))
        c = draw(st.integers(0, max_dim))
        rows = [[draw(st.integers(0, p - 1)) for _ in range(c)]
                for _ in range(r)]
        return dense(f, rows) if r else SparseMatrix(f, 0, c)
    return build()


def test_rank_oracle():
    f = GF(2)
    assert rank(dense(f, [[1, 0], [0, 1]])) == 2
    assert rank(dense(f, [[1, 1], [1, 1]])) == 1
    assert rank(SparseMatrix(f, 3, 3)) == 0


def test_rank_oracle_odd_char():
    f = GF(5)
    assert rank(dense(f, [[2, 4], [1, 2]])) == 1
    assert rank(dense(f, [[2, 4], [1, 3]])) == 2


def test_solve_oracle():
    f = GF(3)
    m = dense(f, [[1, 2], [0, 1]])
    x = solve(m, [0, 2])
    assert x is not None
    assert (m @ dense(f, [[x[0]], [x[1]]])).to_dense() == [[0], [2]]
    assert solve(dense(f, [[1, 1], [1, 1]]), [1, 0]) is None


@settings(max_examples=60, deadline=None)
@given(matrices(p=2), st.randoms(use_true_random=False))
def test_kernel_annihilates(m, _rng):
    for v in kernel_basis(m):
        col = SparseMatrix(m.field, m.cols, 1,
                           {(i, 0): x for i, x in enumerate(v) if x})
        assert not (m @ col).entries


@settings(max_examples=60, deadline=None)
@given(matrices(p=3))
def test_rank_nullity(m):
    assert rank(m) + len(kernel_basis(m)) == m.cols


@settings(max_examples=40, deadline=None)
@given(matrices(p=2))
def test_rref_row_space_preserved(m):
    red, pivots = rref(m)
    assert rank(red) == rank(m) == len(pivots)


@settings(max_examples=40, deadline=None)
@given(matrices(p=5))
def test_quotient_projection_kills_span(span):
    P, free_cols = quotient_projection(span)
    assert P.rows == span.cols - rank(span)
    # P vanishes on the row space of span
    prod = P @ span.transpose()
    assert not prod.entries
    assert len(free_cols) == P.rows


@settings(max_examples=40, deadline=None)
@given(matrices(p=2))
def test_solve_matrix_consistency(m):
    # solving against m's own column space always succeeds
    x = solve_matrix(m, m)
    assert x is not None
    assert (m @ x).to_dense() == m.to_dense()


def test_gf_validates_primality():
    with pytest.raises(Exception):
        GF(6)
