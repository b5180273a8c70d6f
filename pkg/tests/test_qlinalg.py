from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rhmap.errors import InputError
from rhmap.qlinalg import RationalMatrix, extend_to_basis, image_basis, inverse, kernel_basis, rank, rref, solve, to_rational

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    rows = [[draw(small) for _ in range(c)] for _ in range(r)]
    return RationalMatrix.from_rows(rows, c)


def test_rref_identity_and_zero():
    assert rref(RationalMatrix.identity(2))[0::2] == (2, [0, 1])
    rk, red, piv = rref(RationalMatrix.zeros(3, 2))
    assert (rk, piv) == (0, []) and red.is_zero()


def test_rref_rank_one():
    rk, red, piv = rref(RationalMatrix.from_rows([[1, 2], [2, 4]]))
    assert (rk, piv) == (1, [0])
    assert red.entries == ((1, 2), (0, 0))


def test_kernel_examples():
    assert kernel_basis(RationalMatrix.identity(3)) == []
    (v,) = kernel_basis(RationalMatrix.from_rows([[1, 2], [2, 4]]))
    assert v[0] == -2 * v[1] and v != (0, 0)
    assert kernel_basis(RationalMatrix.zeros(2, 3)) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_solve_examples():
    b = (Fraction(3, 2), Fraction(-5))
    assert solve(RationalMatrix.identity(2), b) == b
    assert solve(RationalMatrix.from_rows([[1, 2], [2, 4]]), (1, 3)) is None
    assert solve(RationalMatrix.zeros(2, 3), (0, 0)) == (0, 0, 0)
    with pytest.raises(InputError):
        solve(RationalMatrix.identity(2), (1, 2, 3))


def test_no_floats():
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        RationalMatrix.from_rows([[0.5]])


def test_inverse_and_extend():
    m = RationalMatrix.from_rows([[2, 1], [1, 1]])
    assert (m @ inverse(m)) == RationalMatrix.identity(2)
    picked = extend_to_basis([(1, 0, 0)], [(2, 0, 0), (1, 1, 0), (0, 1, 0), (0, 0, 5)], 3)
    assert picked == [(1, 1, 0), (0, 0, 5)]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    assert rank(m) + len(kernel_basis(m)) == m.cols
    for v in kernel_basis(m):
        assert all(x == 0 for x in m.apply(v))
    assert len(image_basis(m)) == rank(m)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rref_idempotent_and_row_space(m):
    rk, red, _ = rref(m)
    assert rref(red)[1] == red
    # row space preserved: stacking does not raise the rank
    stacked = RationalMatrix.from_rows(list(m.entries) + list(red.entries), m.cols)
    assert rank(stacked) == rk


@settings(max_examples=150, deadline=None)
@given(matrices(), st.data())
def test_solve_reproduces_rhs(m, data):
    x = [data.draw(small) for _ in range(m.cols)]
    b = m.apply(x)
    sol = solve(m, b)
    assert sol is not None and m.apply(sol) == b
