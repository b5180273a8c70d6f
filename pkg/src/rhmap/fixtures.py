"""Random small CDGAs and Sullivan algebras for property tests and experiments."""

from __future__ import annotations

import random
from fractions import Fraction

from .cdga import UNIT, FiniteCdga, SullivanAlgebra
from .graded import GradedVectorSpace, vclean
from .qlinalg import RationalMatrix, kernel_basis


def random_sullivan(rng: random.Random, degrees, linear: bool = False, name="S") -> SullivanAlgebra:
    """Sullivan algebra built generator by generator, dv a random cocycle.

    With ``linear`` the differential may have a linear part (non-minimal).
    """
    degrees = sorted(degrees)
    gens = []
    diff = {}
    for k, n in enumerate(degrees):
        label = f"v{k}"
        S = SullivanAlgebra(GradedVectorSpace(tuple(gens)), dict(diff), name=name) if gens else None
        dv = {}
        if S is not None:
            monos = S.monomials(n + 1, min_length=1 if linear else 2)
            if monos:
                cols = []
                tgt = S.monomials(n + 2, min_length=1)
                for m in monos:
                    img = S.d({m: Fraction(1)})
                    cols.append([img.get(t, 0) for t in tgt])
                if tgt:
                    ker = kernel_basis(RationalMatrix.from_columns(cols, len(tgt)))
                else:
                    ker = [tuple(Fraction(int(i == j)) for j in range(len(monos))) for i in range(len(monos))]
                for vec in ker:
                    c = rng.choice([0, 0, 1, -1, 2])
                    for m, x in zip(monos, vec):
                        if x and c:
                            dv[m] = dv.get(m, 0) + c * x
        gens.append((label, n))
        dv = {m: c for m, c in dv.items() if c}
        if dv:
            diff[label] = dv
    return SullivanAlgebra(GradedVectorSpace(tuple(gens)), diff, name=name)


def truncate(S: SullivanAlgebra, top: int, name="A") -> FiniteCdga:
    """The finite CDGA ΛV / Λ^{>top}V."""
    monos = [()]
    for n in range(1, top + 1):
        monos += S.monomials(n)
    label = {m: ("*".join(m) if m else UNIT) for m in monos}
    space = GradedVectorSpace(tuple((label[m], S.mono_degree(m)) for m in monos))
    keep = set(monos)
    prod = {}
    for a in monos:
        for b in monos:
            if not a or not b:
                continue
            p = S.mul({a: Fraction(1)}, {b: Fraction(1)})
            v = {label[m]: c for m, c in p.items() if m in keep}
            if v:
                prod[(label[a], label[b])] = v
    diff = {}
    for m in monos:
        p = S.d({m: Fraction(1)})
        v = {label[x]: c for x, c in p.items() if x in keep}
        if v:
            diff[label[m]] = v
    return FiniteCdga(space, prod, diff, name=name)


def random_cdga(rng: random.Random, max_dim: int = 12, min_dim: int = 8) -> FiniteCdga:
    """Truncated random Sullivan algebras, retried until the dimension fits."""
    for _ in range(200):
        ngen = rng.randint(2, 4)
        degs = [rng.randint(1, 4) for _ in range(ngen)]
        S = random_sullivan(rng, degs, linear=rng.random() < 0.6)
        for top in range(3, 12):
            A = truncate(S, top)
            if min_dim <= len(A.space) <= max_dim:
                return A
            if len(A.space) > max_dim:
                break
    raise RuntimeError("could not find a random CDGA of the requested size")
