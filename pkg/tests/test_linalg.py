import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extcot.linalg import (Matrix, ModulusError, in_span, inverse, kernel_basis, kron, left_inverse, nonzero_det_batch,
                           quotient_maps, rank, rref, solve)


def M(rows, p=2):
    return Matrix(rows, p)


@st.composite
def matrices(draw, p=None, max_side=5):
    p = p or draw(st.sampled_from([2, 3, 5]))
    r = draw(st.integers(0, max_side))
    c = draw(st.integers(0, max_side))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return Matrix(np.array(vals, dtype=np.int64).reshape(r, c), p)


def test_rref_examples():
    r, piv = rref(M([[1, 0], [0, 1]]))
    assert r == M([[1, 0], [0, 1]]) and piv == [0, 1]
    r, piv = rref(M([[1, 1], [1, 1]]))
    assert r == M([[1, 1], [0, 0]]) and piv == [0]
    r, piv = rref(M([[0, 1], [1, 0]], 3))
    assert r == M([[1, 0], [0, 1]], 3) and piv == [0, 1]


def test_kernel_examples():
    assert kernel_basis(M([[1, 0], [0, 1]])).cols == 0
    assert kernel_basis(Matrix.zeros(2, 3, 2)).cols == 3
    k = kernel_basis(M([[1, 1]]))
    assert k.tolist() == [[1], [1]]


def test_solve_examples():
    b = M([[1, 0, 1], [0, 1, 1]])
    assert solve(Matrix.identity(2, 2), b) == b
    x = solve(M([[1, 1]]), M([[1]]))
    assert (M([[1, 1]]) @ x) == M([[1]])
    assert solve(Matrix.zeros(2, 2, 2), M([[1], [0]])) is None


def test_moduli_do_not_mix():
    with pytest.raises(ModulusError):
        M([[1]], 2) @ M([[1]], 3)
    with pytest.raises(ModulusError):
        Matrix([[1]], 4)


def test_immutable():
    m = M([[1, 0]])
    with pytest.raises(Exception):
        m.a[0, 0] = 0
    with pytest.raises(AttributeError):
        m.p = 3


def test_kron_shape_and_entries():
    a, b = M([[1, 1], [0, 1]], 3), M([[2], [1]], 3)
    k = kron(a, b)
    assert k.shape == (4, 2)
    assert k.tolist() == [[2, 2], [1, 1], [0, 2], [0, 1]]


def _brute_kernel_size(m: Matrix) -> int:
    p, c = m.p, m.cols
    return sum(1 for v in itertools.product(range(p), repeat=c)
               if not (m.a @ np.array(v, dtype=np.int64) % p).any())


@settings(max_examples=60, deadline=None)
@given(matrices(p=2, max_side=4))
def test_kernel_matches_enumeration(m):
    assert m.p ** kernel_basis(m).cols == _brute_kernel_size(m)


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    k = kernel_basis(m)
    assert rank(m) + k.cols == m.cols
    if k.cols and m.rows:
        assert (m @ k).is_zero()


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rref_is_reduced(m):
    r, piv = rref(m)
    assert rank(r) == len(piv) == rank(m)
    for i, c in enumerate(piv):
        col = r.a[:, c]
        assert col[i] == 1 and col.sum() == 1


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solve_consistent(a, data):
    p = a.p
    cols = data.draw(st.integers(0, 3))
    xs = data.draw(st.lists(st.integers(0, p - 1), min_size=a.cols * cols, max_size=a.cols * cols))
    x = Matrix(np.array(xs, dtype=np.int64).reshape(a.cols, cols), p)
    b = a @ x
    y = solve(a, b)
    assert y is not None and (a @ y) == b


@settings(max_examples=60, deadline=None)
@given(matrices(max_side=4))
def test_inverse(m):
    if m.rows != m.cols:
        return
    inv = inverse(m)
    if rank(m) == m.rows:
        assert inv is not None and (m @ inv) == Matrix.identity(m.rows, m.p)
    else:
        assert inv is None
    if m.rows:
        assert bool(nonzero_det_batch(m.a[None], m.p)[0]) == (inv is not None)


@settings(max_examples=60, deadline=None)
@given(matrices(max_side=4))
def test_quotient_maps(m):
    # proj kills the column span and sec splits proj
    proj, sec = quotient_maps(m)
    p = m.p
    assert proj.rows == m.rows - rank(m)
    if m.cols and proj.rows:
        assert (proj @ m).is_zero()
    assert (proj @ sec) == Matrix.identity(proj.rows, p)


@settings(max_examples=40, deadline=None)
@given(matrices(max_side=4))
def test_left_inverse_and_span(m):
    r, piv = rref(m)
    basis = Matrix(m.a[:, piv], m.p, rows=m.rows, cols=len(piv))
    li = left_inverse(basis)
    assert (li @ basis) == Matrix.identity(len(piv), m.p)
    for j in range(m.cols):
        assert in_span(basis, Matrix(m.a[:, [j]], m.p, rows=m.rows, cols=1))
