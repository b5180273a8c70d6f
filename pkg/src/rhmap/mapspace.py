"""L∞-models of mapping spaces map(X, Y) for two-stage Y, and their components.

The model is H ⊗ L with H = H*(X; Q) and L the minimal L∞-model of Y; its
brackets are h_1⋯h_k ⊗ [x_1, ..., x_k] (up to Koszul signs).  Components are
the truncated twisted algebras (H⊗L^z)_{≥0} at Maurer–Cartan elements z.

Sign note: with ℓ_k of degree k-2 and the Jacobi signs of ``linfty``, the
Maurer–Cartan residual of a degree -1 element is

    Σ_k (-1)^{k(k-1)/2} / k! · ℓ_k(z, ..., z)

and the twisted brackets are

    ℓ^z_k(w) = Σ_j (-1)^{jk + j(j-1)/2} / j! · ℓ_{k+j}(z, ..., z, w).

Both are the plain exponential formulas Σ 1/k! m_k(sz, ..., sz) on the
suspension; when only ℓ_2 and ℓ_3 occur the MC set is the zero set of
Σ 1/k! ℓ_k(z, ..., z).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Mapping, Sequence

from .cdga import UNIT, FiniteCdga, HomotopyRetract, SullivanAlgebra, cohomology, harmonious_decomposition, two_stage_split
from .errors import InputError, InvariantError
from .graded import GradedVectorSpace, Vec, render_vec, vadd, vclean, vscale
from .linfty import (
    LInfinityAlgebra,
    Report,
    bracket,
    ce_construct,
    ce_dual,
    check_jacobi,
    decalage_sign,
    split_label,
    sym_bracket,
    tensor_label,
    tensor_model,
)
from .qlinalg import RationalMatrix, kernel_basis, rank, solve
from .transfer import (
    TransferProblem,
    input_words,
    minimal_problem,
    multi_vertex_residuals,
    tensor_problem,
    transfer,
    tree_contributions,
)


@dataclass(frozen=True)
class MappingSpaceModel:
    H: FiniteCdga
    L: LInfinityAlgebra
    model: LInfinityAlgebra
    Y: SullivanAlgebra | None = None
    P: tuple = ()
    Q: tuple = ()

    @property
    def space(self) -> GradedVectorSpace:
        return self.model.space

    def dimensions(self, min_degree: int | None = None) -> dict[int, int]:
        dims = self.space.dimensions()
        if min_degree is not None:
            dims = {d: n for d, n in dims.items() if d >= min_degree}
        return dims

    def nonzero_brackets(self) -> list[tuple[int, tuple, Vec]]:
        return [(k, key, v) for k, key, v in self.model.entries() if k >= 2]


def mapping_space_model(H: FiniteCdga, Y: SullivanAlgebra) -> MappingSpaceModel:
    """H ⊗ L with the closed-form brackets, L = ce_dual(Y)."""
    if H.differential:
        raise InputError("the source algebra must have zero differential (a cohomology algebra)")
    H.check()
    P, Q = two_stage_split(Y)
    L = ce_dual(Y)
    model = tensor_model(H, L)
    return MappingSpaceModel(H, L, model, Y, tuple(P), tuple(Q))


@dataclass
class TransferAgreement:
    agrees: bool
    mismatches: list = field(default_factory=list)
    multi_vertex_nonzero: list = field(default_factory=list)
    cohomology: FiniteCdga | None = None
    transferred: LInfinityAlgebra | None = None

    def __bool__(self):
        return self.agrees and not self.multi_vertex_nonzero


def check_transfer_agreement(A: FiniteCdga, Y: SullivanAlgebra, max_arity: int = 4, method: str = "trees") -> TransferAgreement:
    """Transfer A⊗L along the retract of A and compare with the closed formula on H(A)⊗L."""
    A.check()
    two_stage_split(Y)
    L = ce_dual(Y)
    r = harmonious_decomposition(A)
    H = cohomology(A, r)
    ambient = tensor_model(A, L, arity_bound=max(L.brackets, default=1))
    P = tensor_problem(ambient, r, L)
    got = transfer(P, max_arity, method=method)
    want = tensor_model(H, L)
    mism = []
    for k in range(1, max_arity + 1):
        a, b = got.brackets.get(k, {}), want.brackets.get(k, {})
        for key in set(a) | set(b):
            if vclean(a.get(key, {})) != vclean(b.get(key, {})):
                mism.append((k, key, a.get(key, {}), b.get(key, {})))
    multi = multi_vertex_residuals(P, max_arity)
    return TransferAgreement(not mism, mism, multi, H, got)


# ---------------------------------------------------------------------------
# Maurer–Cartan elements


def _check_mc_degree(M: MappingSpaceModel, z: Mapping):
    for l in z:
        if l not in M.space:
            raise InputError(f"{l!r} is not a basis element of the model")
        if M.space.degree(l) != -1:
            raise InputError(f"MC elements live in degree -1; {l} has degree {M.space.degree(l)}")


def _curvature(L: LInfinityAlgebra, z: Mapping, bound: int) -> Vec:
    out: Vec = {}
    if not z:
        return out
    for k in range(1, bound + 1):
        if k in L.brackets:
            vadd(out, sym_bracket(L, k, [z] * k), Fraction(1, factorial(k)))
    return out


def mc_residual(M: MappingSpaceModel, z: Mapping) -> Vec:
    z = vclean(z)
    _check_mc_degree(M, z)
    return _curvature(M.model, z, M.model.arity_bound)


@dataclass(frozen=True)
class MaurerCartanElement:
    element: Mapping[str, Fraction]
    residual: Mapping[str, Fraction]

    @property
    def certified(self) -> bool:
        return not self.residual

    def __str__(self):
        return render_vec(self.element)


def maurer_cartan(M: MappingSpaceModel, z: Mapping) -> MaurerCartanElement:
    z = vclean(z)
    return MaurerCartanElement(z, mc_residual(M, z))


@dataclass
class MCDescription:
    parameters: list[str]
    equations: dict  # output label -> {monomial (tuple of parameters): coefficient}
    kind: str  # "empty", "zero", "linear" or "nonlinear"
    family: list = field(default_factory=list)  # basis of the solution space (zero/linear kinds)
    verified: list = field(default_factory=list)
    rejected: list = field(default_factory=list)

    @property
    def dimension(self) -> int | None:
        return len(self.family) if self.kind in ("empty", "zero", "linear") else None


def mc_system(M: MappingSpaceModel) -> tuple[list[str], dict]:
    """Residual of z = Σ t_p p as polynomials in the coordinates t_p."""
    params = M.space.slice(-1)
    eqs: dict[str, dict] = {}
    L = M.model
    for k in range(1, L.arity_bound + 1):
        if k not in L.brackets:
            continue
        for word in combinations_with_replacement(params, k):
            mult = {}
            for w in word:
                mult[w] = mult.get(w, 0) + 1
            denom = 1
            for m in mult.values():
                denom *= factorial(m)
            # degree -1 entries commute in the symmetric picture, so Σ over orderings collapses
            val = sym_bracket(L, k, [{w: 1} for w in word])
            for out, c in val.items():
                poly = eqs.setdefault(out, {})
                poly[word] = poly.get(word, 0) + c / denom
    eqs = {o: {m: c for m, c in p.items() if c} for o, p in eqs.items()}
    return params, {o: p for o, p in eqs.items() if p}


def solve_mc(M: MappingSpaceModel, candidates: Sequence[Mapping] = ()) -> MCDescription:
    params, eqs = mc_system(M)
    if not params:
        return MCDescription([], {}, "empty", [], [{}])
    unit = lambda p: {p: Fraction(1)}
    verified, rejected = [], []
    for c in candidates:
        mc = maurer_cartan(M, c)
        (verified if mc.certified else rejected).append(dict(mc.element))
    if not eqs:
        return MCDescription(params, {}, "zero", [unit(p) for p in params], verified, rejected)
    if all(len(m) == 1 for p in eqs.values() for m in p):
        outs = sorted(eqs)
        rows = [[eqs[o].get((p,), 0) for p in params] for o in outs]
        ker = kernel_basis(RationalMatrix.from_rows(rows, len(params)))
        fam = [vclean(dict(zip(params, v))) for v in ker]
        return MCDescription(params, eqs, "linear", fam, verified, rejected)
    return MCDescription(params, eqs, "nonlinear", [], verified, rejected)


def poly_text(poly: Mapping[tuple, Fraction]) -> str:
    return render_vec({"*".join(f"t[{p}]" for p in m): c for m, c in poly.items()})


# ---------------------------------------------------------------------------
# twisting and truncation


@dataclass(frozen=True)
class ComponentModel:
    base: MappingSpaceModel
    mc: MaurerCartanElement
    twisted: LInfinityAlgebra
    truncated: LInfinityAlgebra
    embedding: Mapping[str, Vec]  # truncated basis label -> vector in the model

    def d(self, v: Mapping) -> Vec:
        return bracket(self.truncated, 1, [v]) if v and 1 in self.truncated.brackets else {}


def _words(space: GradedVectorSpace, k: int, allowed_out: set, labels=None):
    labels = space.labels if labels is None else labels
    for combo in combinations_with_replacement(labels, k):
        if any(a == b and space.degree(a) % 2 == 0 for a, b in zip(combo, combo[1:])):
            continue
        if sum(space.degree(c) for c in combo) + k - 2 not in allowed_out:
            continue
        yield combo


def twisted_brackets(L: LInfinityAlgebra, z: Mapping, min_degree: int | None = None) -> LInfinityAlgebra:
    """ℓ^z on (a degree-bounded part of) L; words drawn from degrees ≥ min_degree."""
    sp = L.space
    labels = [l for l in sp.labels if min_degree is None or sp.degree(l) >= min_degree]
    present = set(sp.degrees())
    bound = L.arity_bound
    br = {}
    for k in range(1, bound + 1):
        tab = {}
        for word in _words(sp, k, present, labels):
            val: Vec = {}
            for j in range(0, bound - k + 1):
                if (k + j) not in L.brackets or (j and not z):
                    continue
                vadd(val, sym_bracket(L, k + j, [z] * j + [{w: 1} for w in word]), Fraction(1, factorial(j)))
            if val:
                tab[word] = vscale(val, decalage_sign([sp.degree(w) for w in word]))
        if tab:
            br[k] = tab
    return LInfinityAlgebra(sp, br, arity_bound=bound, name=f"{L.name}^z")


def restrict(L: LInfinityAlgebra, basis: Sequence[tuple[str, int, Mapping]], name=None) -> LInfinityAlgebra:
    """Sub-L∞-algebra on the span of the given vectors (must be closed under brackets)."""
    space = GradedVectorSpace(tuple((l, d) for l, d, _ in basis))
    vec = {l: vclean(v) for l, _, v in basis}
    by_deg: dict[int, list[str]] = {}
    for l, d, _ in basis:
        by_deg.setdefault(d, []).append(l)
    plain = all(len(v) == 1 and v.get(l) == 1 for l, v in vec.items())

    def coords(v: Vec) -> Vec:
        if plain:
            bad = [x for x in v if x not in vec]
            if bad:
                raise InvariantError(f"bracket leaves the subspace: {render_vec(v)}")
            return dict(v)
        out: Vec = {}
        degs = {L.deg(x) for x in v}
        for d in degs:
            part = {x: c for x, c in v.items() if L.deg(x) == d}
            cols = by_deg.get(d, [])
            rows = sorted({x for l in cols for x in vec[l]} | set(part))
            m = RationalMatrix.from_rows([[vec[l].get(r, 0) for l in cols] for r in rows], len(cols))
            sol = solve(m, [part.get(r, 0) for r in rows]) if cols else None
            if sol is None:
                raise InvariantError(f"bracket leaves the subspace: {render_vec(part)}")
            vadd(out, dict(zip(cols, sol)))
        return out

    present = set(space.degrees())
    br = {}
    for k in sorted(L.brackets):
        tab = {}
        for word in _words(space, k, present if k > 1 else present | {min(present, default=0) - 1}):
            val = bracket(L, k, [vec[w] for w in word])
            if val:
                c = coords(val)
                if c:
                    tab[word] = c
        if tab:
            br[k] = tab
    return LInfinityAlgebra(space, br, arity_bound=L.arity_bound, name=name or L.name)


def twist(M: MappingSpaceModel, z: MaurerCartanElement) -> ComponentModel:
    if not z.certified:
        raise InputError(f"{z} is not a Maurer–Cartan element (residual {render_vec(z.residual)})")
    zt = dict(z.element)
    tw = twisted_brackets(M.model, zt)
    sp = M.space
    basis = [(l, d, {l: Fraction(1)}) for l, d in sp if d >= 1]
    zero = sp.slice(0)
    d0 = {l: bracket(tw, 1, [{l: 1}]) if 1 in tw.brackets else {} for l in zero}
    if all(not v for v in d0.values()):
        basis += [(l, 0, {l: Fraction(1)}) for l in zero]
    elif zero:
        tgt = sorted({x for v in d0.values() for x in v})
        m = RationalMatrix.from_columns([[d0[l].get(t, 0) for t in tgt] for l in zero], len(tgt))
        for n, kv in enumerate(kernel_basis(m)):
            v = vclean(dict(zip(zero, kv)))
            if len(v) == 1 and next(iter(v.values())) == 1:
                basis.append((next(iter(v)), 0, v))
            else:
                basis.append((f"cyc0_{n}", 0, v))
    trunc = restrict(tw, basis, name=f"({M.model.name})^z_>=0")
    return ComponentModel(M, z, tw, trunc, {l: v for l, _, v in basis})


def component(M: MappingSpaceModel, z: Mapping) -> ComponentModel:
    return twist(M, maurer_cartan(M, z))


def differential_rank(L: LInfinityAlgebra) -> int:
    if 1 not in L.brackets:
        return 0
    labels = L.space.labels
    cols = [[bracket(L, 1, [{l: 1}]).get(t, 0) for t in labels] for l in labels]
    return rank(RationalMatrix.from_columns(cols, len(labels)))


def homology_dimensions(L: LInfinityAlgebra) -> dict[int, int]:
    """dim H_n(L, ℓ_1) for every degree n of L."""
    out = {}
    sp = L.space
    for n in sp.degrees():
        src = sp.slice(n)
        below = sp.slice(n - 1)
        above = sp.slice(n + 1)

        def rk(a, b):
            if not a or not b or 1 not in L.brackets:
                return 0
            cols = [[bracket(L, 1, [{x: 1}]).get(t, 0) for t in b] for x in a]
            return rank(RationalMatrix.from_columns(cols, len(b)))

        out[n] = len(src) - rk(src, below) - rk(above, src)
    return out


def component_homotopy_ranks(C: ComponentModel) -> dict[int, int]:
    """{n+1: dim H_n}: ranks of π_{n+1}(map(X, Y; f)) ⊗ Q, nonzero entries only."""
    return {n + 1: r for n, r in sorted(homology_dimensions(C.truncated).items()) if r}


def euler_bookkeeping(C: ComponentModel) -> tuple[int, int, int]:
    """(Σ dim H, dim truncated, rank ℓ_1^z); the first equals the second minus twice the third."""
    total_h = sum(homology_dimensions(C.truncated).values())
    return total_h, len(C.truncated.space), differential_rank(C.truncated)


def default_transfer_arity(L: LInfinityAlgebra) -> int:
    """Brackets of nonnegatively graded inputs have degree ≥ k-2, so k ≤ top degree + 2."""
    degs = L.space.degrees()
    return max(2, (degs[-1] if degs else 0) + 2)


def minimal_component(C: ComponentModel, max_arity: int | None = None) -> tuple[TransferProblem, LInfinityAlgebra]:
    P = minimal_problem(C.truncated)
    arity = max_arity or default_transfer_arity(C.truncated)
    return P, transfer(P, arity)


def generator_names(space: GradedVectorSpace) -> dict[str, str]:
    """a<deg>, a<deg>_2, ... for homology labels, in basis order (Sullivan degree = L degree + 1)."""
    names = {}
    count: dict[int, int] = {}
    for l, d in space:
        n = count[d] = count.get(d, 0) + 1
        names[l] = f"a{d + 1}" if n == 1 else f"a{d + 1}_{n}"
    return names


def component_minimal_model(C: ComponentModel, max_arity: int | None = None, rename: bool = True) -> SullivanAlgebra:
    _, minimal = minimal_component(C, max_arity)
    if rename:
        names = generator_names(minimal.space)
        minimal = relabel(minimal, names)
    return ce_construct(minimal, name="component")


def relabel(L: LInfinityAlgebra, names: Mapping[str, str]) -> LInfinityAlgebra:
    space = GradedVectorSpace(tuple((names[l], d) for l, d in L.space))
    br = {
        k: {tuple(names[x] for x in key): {names[o]: c for o, c in v.items()} for key, v in tab.items()}
        for k, tab in L.brackets.items()
    }
    return LInfinityAlgebra(space, br, arity_bound=L.arity_bound, name=L.name)


@dataclass
class GroupLikeReport:
    grouplike: bool
    max_arity: int
    exhaustive: bool  # max_arity reaches the degree bound, so no bracket was left unchecked
    brackets: list = field(default_factory=list)  # (k, word, value, {tree code: value})
    homology: GradedVectorSpace | None = None
    examined: dict = field(default_factory=dict)  # arity -> number of input words evaluated


def is_grouplike(C: ComponentModel, max_arity: int = 4) -> GroupLikeReport:
    P, minimal = minimal_component(C, max_arity)
    found = []
    for k, key, v in minimal.entries():
        prov = tree_contributions(P, key) if k >= 2 else {}
        found.append((k, key, v, prov))
    exhaustive = max_arity >= default_transfer_arity(C.truncated)
    examined = {k: sum(1 for _ in input_words(P.target, k)) for k in range(2, max_arity + 1)}
    return GroupLikeReport(not found, max_arity, exhaustive, found, minimal.space, examined)


# ---------------------------------------------------------------------------
# automorphisms of H


@dataclass(frozen=True)
class AlgebraMorphism:
    source: FiniteCdga
    target: FiniteCdga
    images: Mapping[str, Vec]  # unspecified basis elements map to themselves

    def image(self, label: str) -> Vec:
        if label in self.images:
            return vclean(self.images[label])
        return {label: Fraction(1)}

    def __call__(self, v: Mapping) -> Vec:
        out: Vec = {}
        for l, c in v.items():
            vadd(out, self.image(l), c)
        return out

    def matrix(self, degree: int) -> RationalMatrix:
        src, tgt = self.source.space.slice(degree), self.target.space.slice(degree)
        return RationalMatrix.from_columns([[self.image(s).get(t, 0) for t in tgt] for s in src], len(tgt))

    def check(self, automorphism: bool = True) -> None:
        S, T = self.source, self.target
        for l in S.space.labels:
            for t in self.image(l):
                if t not in T.space or T.space.degree(t) != S.space.degree(l):
                    raise InvariantError(f"ψ({l}) is not of degree {S.space.degree(l)}", l)
        if self.image(UNIT) != {UNIT: 1}:
            raise InvariantError("ψ does not preserve the unit", UNIT)
        for a in S.space.labels:
            for b in S.space.labels:
                lhs = self(S.mul_basis(a, b))
                rhs = T.mul(self.image(a), self.image(b))
                if vadd(lhs, rhs, -1):
                    raise InvariantError(f"ψ does not commute with the product on ({a}, {b})", (a, b))
        if automorphism:
            for d in S.space.degrees():
                m = self.matrix(d)
                if m.rows != m.cols or rank(m) != m.cols:
                    raise InvariantError(f"ψ is not invertible in degree {d}", d)


def tensor_map(psi: AlgebraMorphism, v: Mapping) -> Vec:
    """(ψ ⊗ id) on vectors of H ⊗ L."""
    out: Vec = {}
    for lab, c in v.items():
        h, l = split_label(lab)
        for h2, c2 in psi.image(h).items():
            vadd(out, {tensor_label(h2, l): c * c2})
    return out


def apply_automorphism(psi: AlgebraMorphism, M: MappingSpaceModel, z: MaurerCartanElement) -> MaurerCartanElement:
    try:
        psi.check()
    except InvariantError as e:
        raise InputError(f"not an algebra automorphism: {e}") from e
    out = maurer_cartan(M, tensor_map(psi, z.element))
    if not out.certified:
        raise InvariantError(f"(ψ⊗id)(z) failed the MC check: {render_vec(out.residual)}")
    return out


@dataclass
class EquivalenceWitness:
    equivalent: bool
    matrix: dict  # source truncated label -> vector over target truncated labels
    failures: list = field(default_factory=list)


def verify_component_equivalence(psi: AlgebraMorphism, C: ComponentModel, C2: ComponentModel) -> EquivalenceWitness:
    if vclean(tensor_map(psi, C.mc.element)) != vclean(C2.mc.element):
        raise InputError(
            f"(ψ⊗id)({C.mc}) = {render_vec(tensor_map(psi, C.mc.element))} is not {C2.mc}"
        )
    A, B = C.truncated, C2.truncated
    bvec = C2.embedding
    failures = []
    witness = {}
    for l, d in A.space:
        img = tensor_map(psi, C.embedding[l])
        cols = B.space.slice(d)
        rows = sorted({x for c in cols for x in bvec[c]} | set(img))
        m = RationalMatrix.from_rows([[bvec[c].get(r, 0) for c in cols] for r in rows], len(cols))
        sol = solve(m, [img.get(r, 0) for r in rows]) if cols else None
        if sol is None:
            failures.append(f"ψ⊗id({l}) leaves the target component")
            continue
        witness[l] = vclean(dict(zip(cols, sol)))
    if failures:
        return EquivalenceWitness(False, witness, failures)
    for d in A.space.degrees():
        src = A.space.slice(d)
        tgt = B.space.slice(d)
        m = RationalMatrix.from_columns([[witness[s].get(t, 0) for t in tgt] for s in src], len(tgt))
        if len(src) != len(tgt) or rank(m) != len(src):
            failures.append(f"ψ⊗id is not invertible in degree {d}")
    phi = lambda v: _apply(witness, v)
    present = set(A.space.degrees())
    for k in sorted(set(A.brackets) | set(B.brackets)):
        for word in _words(A.space, k, present | ({min(present) - 1} if k == 1 else set())):
            lhs = phi(bracket(A, k, [{w: 1} for w in word]))
            rhs = bracket(B, k, [witness[w] for w in word])
            if vadd(lhs, rhs, -1):
                failures.append(f"ψ⊗id does not commute with ℓ_{k} on {word}")
    return EquivalenceWitness(not failures, witness, failures)


def _apply(table, v):
    out: Vec = {}
    for k, c in v.items():
        vadd(out, table.get(k, {}), c)
    return out


def rank_vector(C: ComponentModel) -> tuple:
    return tuple(sorted(component_homotopy_ranks(C).items()))


def classify(M: MappingSpaceModel, representatives: Sequence[Mapping]) -> dict[tuple, list]:
    """Group certified MC representatives by the homotopy rank vectors of their components."""
    groups: dict[tuple, list] = {}
    for z in representatives:
        C = component(M, z)
        groups.setdefault(rank_vector(C), []).append(dict(C.mc.element))
    return groups
