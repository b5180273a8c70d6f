from fractions import Fraction
from itertools import permutations, product
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rhmap.errors import InputError
from rhmap.graded import GradedElement, GradedVectorSpace, koszul_sign, shuffles, suspend


def test_koszul_examples():
    assert koszul_sign((1, 0), (3, 3)) == -1
    assert koszul_sign((0, 1, 2), (1, 2, 3)) == 1
    assert koszul_sign((1, 0), (2, 5)) == 1
    with pytest.raises(InputError):
        koszul_sign((0, 1), (1,))
    with pytest.raises(InputError):
        koszul_sign((0, 0), (1, 1))


def test_koszul_multiplicative_exhaustive():
    for n in range(1, 5):
        for degs in product((1, 2, 3), repeat=n):
            for tau in permutations(range(n)):
                moved = [degs[t] for t in tau]
                for sigma in permutations(range(n)):
                    comp = tuple(tau[s] for s in sigma)
                    assert koszul_sign(comp, degs) == koszul_sign(tau, degs) * koszul_sign(sigma, moved)


def test_shuffle_counts_and_order():
    assert len(shuffles(1, 1)) == 2
    assert sorted(s.perm for s in shuffles(2, 1)) == [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
    assert [s.perm for s in shuffles(0, 4)] == [(0, 1, 2, 3)]
    for n in range(7):
        for i in range(n + 1):
            sh = shuffles(i, n - i)
            assert len(sh) == comb(n, i)
            for s in sh:
                assert list(s.perm[:i]) == sorted(s.perm[:i])
                assert list(s.perm[i:]) == sorted(s.perm[i:])


def test_suspend():
    V = GradedVectorSpace.of({"x": 3, "y": 5, "z": 7})
    assert dict(suspend(V, -1).basis) == {"x": 2, "y": 4, "z": 6}
    assert suspend(V, 0) == V
    assert suspend(suspend(V, -1), 1) == V


def test_space_ordering_and_uniqueness():
    V = GradedVectorSpace.of([("b", 1), ("a", 1), ("c", -2)])
    assert V.labels == ["c", "a", "b"]
    assert V.dimensions() == {-2: 1, 1: 2}
    with pytest.raises(InputError):
        GradedVectorSpace.of([("a", 1), ("a", 2)])


def test_elements():
    V = GradedVectorSpace.of({"a": 1, "b": 1, "c": 2})
    u = GradedElement.of(V, {"a": 1, "b": Fraction(1, 2)})
    assert u.homogeneous_degree == 1
    assert (u - u).terms == {}
    assert (2 * u) == {"a": 2, "b": 1}
    assert GradedElement.of(V, {"a": 1, "c": 1}).homogeneous_degree is None


@given(st.lists(st.integers(-3, 4), min_size=2, max_size=6), st.randoms(use_true_random=False))
def test_double_swap_is_identity(degs, rng):
    n = len(degs)
    perm = list(range(n))
    rng.shuffle(perm)
    inv = [perm.index(i) for i in range(n)]
    moved = [degs[p] for p in perm]
    assert koszul_sign(perm, degs) * koszul_sign(inv, moved) == 1
