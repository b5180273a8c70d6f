import random
from fractions import Fraction

import pytest

from rhmap.cdga import UNIT, FiniteCdga, SullivanAlgebra, is_minimal
from rhmap.errors import InputError
from rhmap.fixtures import random_cdga, random_sullivan
from rhmap.graded import GradedElement, GradedVectorSpace
from rhmap.linfty import (
    LInfinityAlgebra,
    abelian,
    bracket_eval,
    ce_construct,
    ce_dual,
    check_jacobi,
    check_symmetric_jacobi,
    decalage_sign,
    tensor_model,
    verify_two_stage_vanishing,
)


def sul(gens, diff):
    d = {g: {tuple(m.split("*")): Fraction(c) for m, c in p.items()} for g, p in diff.items()}
    return SullivanAlgebra(GradedVectorSpace.of(gens), d)


def el(L, terms):
    return GradedElement.of(L.space, terms)


def test_example_dual(target):
    L = ce_dual(target)
    assert dict(L.space.basis) == {"x": 2, "y": 4, "z": 6}
    assert L.is_minimal and set(L.brackets) == {2}
    assert bracket_eval(L, 2, [el(L, {"x": 1}), el(L, {"y": 1})]) == {"z": 1}
    assert bracket_eval(L, 2, [el(L, {"y": 1}), el(L, {"x": 1})]) == {"z": -1}
    assert bracket_eval(L, 2, [el(L, {"x": 1}), el(L, {"x": 1})]) == {}
    with pytest.raises(InputError):
        bracket_eval(L, 3, [el(L, {"x": 1})] * 3)
    with pytest.raises(InputError):
        bracket_eval(L, 2, [el(L, {"x": 1, "y": 1}), el(L, {"x": 1})])


def test_sphere_and_abelian():
    L = ce_dual(sul({"x": 3}, {}))
    assert dict(L.space.basis) == {"x": 2} and not L.brackets
    S = ce_construct(abelian(GradedVectorSpace.of({"a": 1})))
    assert dict(S.generators.basis) == {"a": 2} and not S.differential
    assert check_jacobi(abelian(GradedVectorSpace.of({"a": 1, "b": 2}))).passed


def test_square_bracket_from_pairing():
    # ⟨e4^2; sa ⊙ sa⟩ = 2 and the décalage sign of (3, 3) is -1, so ℓ2(a, a) = -2 e7
    S = sul({"e4": 4, "e7": 7}, {"e7": {"e4*e4": 1}})
    L = ce_dual(S)
    assert decalage_sign([3, 3]) == -1
    assert L.brackets == {2: {("e4", "e4"): {"e7": Fraction(-2)}}}
    assert check_jacobi(L).passed
    assert ce_construct(L).differential == S.differential


def test_jacobi_detects_corruption():
    sp = GradedVectorSpace.of({"a": 1, "b": 1, "c": 5})
    L = LInfinityAlgebra(sp, {2: {("a", "b"): {"c": 1}}})
    rep = check_jacobi(L)
    assert not rep.passed
    assert any(v.kind.startswith("ℓ_2 has degree") and v.inputs == ("a", "b") for v in rep.violations)


def test_non_minimal_rejected():
    S = SullivanAlgebra(GradedVectorSpace.of({"u": 3, "v": 2}), {"v": {("u",): 1}}, validate=False)
    assert not is_minimal(S)
    with pytest.raises(InputError):
        ce_dual(S)
    sp = GradedVectorSpace.of({"a": 1, "b": 0})
    with pytest.raises(InputError):
        ce_construct(LInfinityAlgebra(sp, {1: {("a",): {"b": 1}}}))


def test_round_trips_on_worked_models(target, wedge_model):
    assert ce_construct(ce_dual(target)).differential == target.differential
    from rhmap.mapspace import component, component_minimal_model

    S = component_minimal_model(component(wedge_model, {}), rename=False)
    assert ce_construct(ce_dual(S)).differential == S.differential


def test_tensor_model_point_and_contractible(target):
    L = ce_dual(target)
    point = FiniteCdga(GradedVectorSpace.of({UNIT: 0}))
    T = tensor_model(point, L)
    assert [d for _, d in T.space] == [d for _, d in L.space]
    assert {k: {tuple(x.split("@")[1] for x in key): {o.split("@")[1]: c for o, c in v.items()} for key, v in tab.items()}
            for k, tab in T.brackets.items()} == L.brackets
    A = FiniteCdga(GradedVectorSpace.of({UNIT: 0, "b": 3, "db": 4}), {}, {"b": {"db": 1}})
    T = tensor_model(A, abelian(GradedVectorSpace.of({"l": 2})))
    assert T.brackets == {1: {("b@l",): {"db@l": 1}}}
    assert check_jacobi(T).passed


def test_tensor_model_degrees(wedge_model):
    T = wedge_model.model
    for l, d in T.space:
        h, x = l.split("@")
        assert d == wedge_model.L.deg(x) - wedge_model.H.deg(h)
    assert not check_jacobi(T).violations


def test_two_stage_vanishing(target, hy):
    assert verify_two_stage_vanishing(ce_dual(target), 4).passed
    assert verify_two_stage_vanishing(abelian(GradedVectorSpace.of({"a": 1})), 4).passed
    sp = GradedVectorSpace.of({"x": 1, "y": 2, "w": 3})
    bad = LInfinityAlgebra(sp, {2: {("x", "x"): {"y": 1}, ("x", "y"): {"w": 1}}})
    rep = verify_two_stage_vanishing(bad, 3)
    assert not rep.passed
    assert ("x", "x", "x") in {v.inputs for v in rep.violations}


def test_two_stage_bracket_support(target):
    L = ce_dual(target)
    P, Q = {"x", "y"}, {"z"}
    for k, key, v in L.entries():
        assert set(key) <= P and set(v) <= Q


def random_algebras(n, seed=7):
    """Mixed fixtures: CE duals of random Sullivan algebras and tensor models over random CDGAs."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        degs = [rng.choice([2, 3, 3, 4, 5, 6, 7]) for _ in range(rng.randint(3, 5))]
        S = random_sullivan(rng, degs)
        if not S.differential:
            continue
        L = ce_dual(S)
        out.append(("dual", L))
        if len(out) % 3 == 0:
            A = random_cdga(rng, max_dim=8, min_dim=4)
            two = random_sullivan(rng, [rng.choice([2, 3]), rng.choice([3, 4]), 5])
            out.append(("tensor", tensor_model(A, ce_dual(two))))
    return out


@pytest.mark.parametrize("kind,L", random_algebras(24), ids=lambda x: x if isinstance(x, str) else "")
def test_random_jacobi(kind, L):
    assert check_jacobi(L, 4).passed
    assert check_symmetric_jacobi(L, 4).passed
    if kind == "dual":
        assert ce_dual(ce_construct(L)).brackets == L.brackets
