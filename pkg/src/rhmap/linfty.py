"""L∞-algebras with sparse bracket tables.

Conventions
-----------
Degrees are homological: ℓ_k has degree k-2, so ℓ_1 lowers degree by one.
ℓ_k is stored on canonical tuples (basis order) and extended to every other
ordering by graded antisymmetry.  The Jacobi identities are checked in the
form

    Σ_{i+j=n+1} Σ_{σ ∈ Sh(i,n-i)} sgn(σ) ε(σ) (-1)^{i(j-1)} ℓ_j(ℓ_i(x_σ...), x_σ...) = 0.

Several constructions (Chevalley–Eilenberg duality, tree transfer,
twisting) are sign-free on the suspension sL, where every bracket becomes a
graded-symmetric operation m_k of degree -1.  The two pictures are related by

    m_k(sx_1, ..., sx_k) = (-1)^{Σ_i (k-i)|x_i|} s ℓ_k(x_1, ..., x_k),

with sL carrying the same labels and degrees shifted up by one.  The
Chevalley–Eilenberg pairing between a Sullivan generator v and sx is
⟨v; sx⟩ = 1; a monomial written in generator order pairs with the word of
the same generators in the same order to the product of multiplicity
factorials (no sign), and

    ⟨d_k v; sx_1 ⊙ ... ⊙ sx_k⟩ = ⟨v; m_k(sx_1, ..., sx_k)⟩.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial
from typing import Iterable, Mapping, Sequence

from .cdga import FiniteCdga, SullivanAlgebra, is_minimal
from .errors import InputError
from .graded import (
    GradedElement,
    GradedVectorSpace,
    Vec,
    antisymmetric_sign,
    koszul_sign,
    render_vec,
    shuffles,
    vadd,
    vclean,
    vscale,
)

Table = dict  # canonical label tuple -> Vec


@dataclass(frozen=True)
class LInfinityAlgebra:
    space: GradedVectorSpace
    brackets: Mapping[int, Table] = field(default_factory=dict)
    arity_bound: int | None = None
    degree_window: tuple[int, int] | None = None
    name: str = "L"

    def __post_init__(self):
        br = {}
        for k, tab in self.brackets.items():
            clean = {}
            for key, out in tab.items():
                out = vclean(out)
                if not out:
                    continue
                s, ck = canonical_antisym(self.space, key)
                if s == 0:
                    continue
                clean[ck] = vscale(out, s)
            if clean:
                br[int(k)] = clean
        object.__setattr__(self, "brackets", br)
        if self.arity_bound is None:
            object.__setattr__(self, "arity_bound", max(br, default=1))
        if self.degree_window is None:
            degs = self.space.degrees()
            object.__setattr__(self, "degree_window", (degs[0], degs[-1]) if degs else (0, 0))

    @property
    def is_minimal(self) -> bool:
        return not self.brackets.get(1)

    @property
    def max_stored_arity(self) -> int:
        return max(self.brackets, default=0)

    def deg(self, label: str) -> int:
        return self.space.degree(label)

    def entries(self) -> Iterable[tuple[int, tuple[str, ...], Vec]]:
        for k in sorted(self.brackets):
            for key in sorted(self.brackets[k], key=lambda t: [self.space.index(x) for x in t]):
                yield k, key, self.brackets[k][key]


# ---------------------------------------------------------------------------
# canonical forms and evaluation


def _sort_with_sign(space: GradedVectorSpace, labels: Sequence[str], antisym: bool):
    idx = [space.index(l) for l in labels]
    degs = [space.degree(l) for l in labels]
    perm = sorted(range(len(labels)), key=lambda p: idx[p])
    sorted_labels = tuple(labels[p] for p in perm)
    for a, b in zip(sorted_labels, sorted_labels[1:]):
        if a == b:
            d = space.degree(a)
            # antisymmetric brackets kill repeated even entries, symmetric ones repeated odd entries
            if (antisym and d % 2 == 0) or (not antisym and d % 2 == 1):
                return 0, None
    s = antisymmetric_sign(perm, degs) if antisym else koszul_sign(perm, degs)
    return s, sorted_labels


def canonical_antisym(space: GradedVectorSpace, labels: Sequence[str]):
    return _sort_with_sign(space, labels, antisym=True)


def decalage_sign(degrees: Sequence[int]) -> int:
    """Sign relating ℓ_k to its symmetric form m_k on the suspension."""
    k = len(degrees)
    e = sum((k - 1 - i) * d for i, d in enumerate(degrees))
    return -1 if e & 1 else 1


def bracket_basis(L: LInfinityAlgebra, labels: Sequence[str]) -> Vec:
    tab = L.brackets.get(len(labels))
    if not tab:
        return {}
    s, key = canonical_antisym(L.space, labels)
    if not s:
        return {}
    out = tab.get(key)
    return vscale(out, s) if out else {}


def _expand(L: LInfinityAlgebra, k: int, args: Sequence[Mapping], basis_fn) -> Vec:
    out: Vec = {}
    if any(not a for a in args):
        return out
    for combo in product(*[list(a.items()) for a in args]):
        labels = [c[0] for c in combo]
        coef = Fraction(1)
        for c in combo:
            coef *= c[1]
        vadd(out, basis_fn(L, labels), coef)
    return out


def bracket(L: LInfinityAlgebra, k: int, args: Sequence[Mapping]) -> Vec:
    """ℓ_k on sparse vectors (multilinear, antisymmetric extension of the table)."""
    if len(args) != k:
        raise InputError(f"ℓ_{k} takes {k} arguments, got {len(args)}")
    if k not in L.brackets:
        return {}
    return _expand(L, k, args, bracket_basis)


def sym_bracket_basis(L: LInfinityAlgebra, labels: Sequence[str]) -> Vec:
    """m_k(s b_1, ..., s b_k) for basis labels, as a vector in sL (same labels)."""
    v = bracket_basis(L, labels)
    if not v:
        return v
    return vscale(v, decalage_sign([L.space.degree(l) for l in labels]))


def sym_bracket(L: LInfinityAlgebra, k: int, args: Sequence[Mapping]) -> Vec:
    if k not in L.brackets:
        return {}
    return _expand(L, k, args, sym_bracket_basis)


def from_symmetric(space: GradedVectorSpace, table: Mapping[int, Mapping[tuple, Mapping]], **kw) -> LInfinityAlgebra:
    """Build an L∞-algebra from symmetric brackets m_k given on canonical tuples."""
    br: dict[int, Table] = {}
    for k, tab in table.items():
        out = {}
        for key, v in tab.items():
            v = vclean(v)
            if v:
                out[tuple(key)] = vscale(v, decalage_sign([space.degree(l) for l in key]))
        br[k] = out
    return LInfinityAlgebra(space, br, **kw)


def bracket_eval(L: LInfinityAlgebra, k: int, args: Sequence[GradedElement]) -> GradedElement:
    if k < 1 or (L.arity_bound is not None and k > L.arity_bound):
        raise InputError(f"arity {k} is beyond the arity bound {L.arity_bound}")
    for a in args:
        degs = {L.deg(l) for l in a.terms}
        if len(degs) > 1:
            raise InputError(f"argument {a!r} is not homogeneous")
    return GradedElement.of(L.space, bracket(L, k, [a.terms for a in args]))


def element_degree(L: LInfinityAlgebra, v: Mapping) -> int | None:
    degs = {L.deg(l) for l in v}
    return degs.pop() if len(degs) == 1 else None


# ---------------------------------------------------------------------------
# Jacobi identities


@dataclass
class Violation:
    kind: str
    inputs: tuple
    residual: Vec

    def __str__(self):
        return f"{self.kind} at ({', '.join(self.inputs)}): {render_vec(self.residual)}"


@dataclass
class Report:
    passed: bool
    violations: list[Violation] = field(default_factory=list)
    checked: int = 0

    def __bool__(self):
        return self.passed


def _multisets(L: LInfinityAlgebra, n: int, degree_ok=None, skip_even_repeats=True):
    labels = L.space.labels
    for combo in combinations_with_replacement(range(len(labels)), n):
        tup = tuple(labels[c] for c in combo)
        if skip_even_repeats and any(
            a == b and L.deg(a) % 2 == 0 for a, b in zip(tup, tup[1:])
        ):
            continue
        if degree_ok is not None and not degree_ok(sum(L.deg(l) for l in tup)):
            continue
        yield tup


def jacobi_residual(L: LInfinityAlgebra, xs: Sequence[str]) -> Vec:
    n = len(xs)
    degs = [L.deg(x) for x in xs]
    total: Vec = {}
    for i in range(1, n + 1):
        j = n + 1 - i
        if i not in L.brackets or j not in L.brackets:
            continue
        outer_sign = -1 if (i * (j - 1)) & 1 else 1
        for sh in shuffles(i, n - i):
            inner = bracket_basis(L, [xs[p] for p in sh.perm[:i]])
            if not inner:
                continue
            rest = [{xs[p]: Fraction(1)} for p in sh.perm[i:]]
            val = bracket(L, j, [inner] + rest)
            if val:
                vadd(total, val, outer_sign * sh.sign(degs))
    return total


def check_degrees(L: LInfinityAlgebra) -> list[Violation]:
    bad = []
    for k, key, out in L.entries():
        want = sum(L.deg(l) for l in key) + k - 2
        for l in out:
            if l not in L.space:
                bad.append(Violation(f"ℓ_{k} output outside the space", key, out))
                break
            if L.deg(l) != want:
                bad.append(Violation(f"ℓ_{k} has degree ≠ {k - 2}", key, out))
                break
    return bad


def check_jacobi(L: LInfinityAlgebra, max_arity: int | None = None) -> Report:
    """Evaluate every generalized Jacobi identity on basis tuples up to ``max_arity``.

    Defaults to 2·arity_bound - 1, the largest arity where a nested pair of
    nonzero brackets can appear.
    """
    if max_arity is None:
        max_arity = max(3, 2 * (L.arity_bound or 1) - 1)
    violations = check_degrees(L)
    present = set(L.space.degrees())
    checked = 0
    for n in range(1, max_arity + 1):
        if not any(i in L.brackets and (n + 1 - i) in L.brackets for i in range(1, n + 1)):
            continue
        for xs in _multisets(L, n, degree_ok=lambda s, n=n: (s + n - 3) in present):
            checked += 1
            r = jacobi_residual(L, xs)
            if r:
                violations.append(Violation(f"Jacobi (n={n})", xs, r))
    return Report(not violations, violations, checked)


def check_symmetric_jacobi(L: LInfinityAlgebra, max_arity: int) -> Report:
    """Same identities in the suspended picture: Σ ε(σ) m_j(m_i(...), ...) = 0.

    Used as an independent cross-check of the décalage signs.
    """
    sdeg = {l: d + 1 for l, d in L.space}
    violations = []
    checked = 0
    labels = L.space.labels
    for n in range(1, max_arity + 1):
        for combo in combinations_with_replacement(range(len(labels)), n):
            xs = tuple(labels[c] for c in combo)
            if any(a == b and sdeg[a] % 2 for a, b in zip(xs, xs[1:])):
                continue
            degs = [sdeg[x] for x in xs]
            total: Vec = {}
            for i in range(1, n + 1):
                j = n + 1 - i
                if i not in L.brackets or j not in L.brackets:
                    continue
                for sh in shuffles(i, n - i):
                    inner = sym_bracket(L, i, [{xs[p]: 1} for p in sh.perm[:i]])
                    if not inner:
                        continue
                    val = sym_bracket(L, j, [inner] + [{xs[p]: 1} for p in sh.perm[i:]])
                    vadd(total, val, sh.koszul(degs))
            checked += 1
            if total:
                violations.append(Violation(f"symmetric Jacobi (n={n})", xs, total))
    return Report(not violations, violations, checked)


# ---------------------------------------------------------------------------
# Chevalley–Eilenberg duality


def _pairing(degs: Sequence[int], labels: Sequence[str]) -> Fraction:
    mult = {}
    for l in labels:
        mult[l] = mult.get(l, 0) + 1
    c = 1
    for m in mult.values():
        c *= factorial(m)
    return Fraction(c)


def ce_dual(S: SullivanAlgebra, degree_window: tuple[int, int] | None = None) -> LInfinityAlgebra:
    """The minimal L∞-algebra L on s⁻¹V^# with C*(L) = S."""
    if not is_minimal(S):
        raise InputError(
            f"{S.name} has a linear differential; minimalize it first (transfer to homology)"
        )
    space = GradedVectorSpace(tuple((v, d - 1) for v, d in S.generators.basis))
    sym: dict[int, dict] = {}
    for v in S.generators.labels:
        for mono, c in S.differential.get(v, {}).items():
            k = len(mono)
            degs = [S.deg(g) for g in mono]
            tab = sym.setdefault(k, {})
            vadd(tab.setdefault(tuple(mono), {}), {v: c * _pairing(degs, mono)})
    L = from_symmetric(space, sym, degree_window=degree_window, name=f"L({S.name})")
    return L


def ce_construct(L: LInfinityAlgebra, degree_window: tuple[int, int] | None = None, name=None) -> SullivanAlgebra:
    """Inverse of ce_dual: the Sullivan algebra Λ((sL)^#) with d dual to the brackets."""
    if not L.is_minimal:
        raise InputError("Chevalley–Eilenberg construction needs a minimal L∞-algebra (ℓ_1 = 0)")
    lo, hi = degree_window or L.degree_window
    keep = [(l, d) for l, d in L.space if lo <= d <= hi]
    gens = GradedVectorSpace(tuple((l, d + 1) for l, d in keep))
    kept = set(gens.labels)
    diff: dict[str, dict] = {}
    for k, key, _ in L.entries():
        if not set(key) <= kept:
            continue
        m = sym_bracket_basis(L, key)
        degs = [L.deg(l) + 1 for l in key]
        pr = _pairing(degs, key)
        for v, c in m.items():
            if v in kept:
                p = diff.setdefault(v, {})
                p[tuple(key)] = p.get(tuple(key), 0) + c / pr
    return SullivanAlgebra(gens, diff, name=name or f"C*({L.name})")


# ---------------------------------------------------------------------------
# tensor model A ⊗ L


def tensor_label(h: str, l: str) -> str:
    return f"{h}@{l}"


def split_label(t: str) -> tuple[str, str]:
    h, _, l = t.partition("@")
    return h, l


def tensor_model(A: FiniteCdga, L: LInfinityAlgebra, arity_bound: int | None = None) -> LInfinityAlgebra:
    """L∞-structure on A ⊗ L, degree(h⊗l) = deg(l) - deg(h).

    ℓ_1(x⊗a) = dx⊗a + (-1)^{|x|} x⊗ℓ_1(a) and, for k ≥ 2,
    ℓ_k(x_1⊗a_1, ..., x_k⊗a_k) = ε x_1⋯x_k ⊗ ℓ_k(a_1, ..., a_k)
    with ε = (-1)^{Σ_{i<j}|a_i||x_j| + k·Σ|x_j|}; the second exponent is the
    Koszul sign of ℓ_k (degree k-2) passing the product, trivial for k = 2.
    """
    basis = []
    for h, dh in A.space:
        for l, dl in L.space:
            basis.append((tensor_label(h, l), dl - dh))
    space = GradedVectorSpace(tuple(basis))
    br: dict[int, Table] = {}
    one = {}
    for h, dh in A.space:
        for l in L.space.labels:
            out: Vec = {}
            for h2, c in A.d({h: 1}).items():
                vadd(out, {tensor_label(h2, l): c})
            for l2, c in bracket_basis(L, [l]).items() if 1 in L.brackets else []:
                vadd(out, {tensor_label(h, l2): c}, -1 if dh & 1 else 1)
            if out:
                one[(tensor_label(h, l),)] = out
    if one:
        br[1] = one
    hlabels = A.space.labels
    for k, tab in L.brackets.items():
        if k < 2:
            continue
        out_tab: Table = {}
        for key, val in tab.items():
            adeg = [L.deg(a) for a in key]
            for hs in product(hlabels, repeat=k):
                prod_v: Vec = {hs[0]: Fraction(1)}
                for h in hs[1:]:
                    prod_v = A.mul(prod_v, {h: 1})
                    if not prod_v:
                        break
                if not prod_v:
                    continue
                e = sum(adeg[i] * A.deg(hs[j]) for j in range(k) for i in range(j))
                e += k * sum(A.deg(h) for h in hs)
                sign = -1 if e & 1 else 1
                res: Vec = {}
                for h, ch in prod_v.items():
                    for l, cl in val.items():
                        vadd(res, {tensor_label(h, l): ch * cl * sign})
                labels = [tensor_label(h, a) for h, a in zip(hs, key)]
                s, ck = canonical_antisym(space, labels)
                if s and res:
                    out_tab[ck] = vscale(res, s)
        if out_tab:
            br[k] = out_tab
    if arity_bound is None:
        arity_bound = max(A.positive_nilpotency() + max(L.brackets, default=1) - 1, max(br, default=1))
    return LInfinityAlgebra(space, br, arity_bound=arity_bound, name=f"{A.name}⊗{L.name}")


# ---------------------------------------------------------------------------
# two-stage vanishing


def verify_two_stage_vanishing(L: LInfinityAlgebra, max_arity: int = 4) -> Report:
    """Check ℓ_j(ℓ_i(x_1..x_i), y_1..y_{j-1}) = 0 for i, j ≥ 2, i+j-1 ≤ max_arity."""
    violations = []
    checked = 0
    for i in sorted(k for k in L.brackets if k >= 2):
        inner_tab = L.brackets[i]
        for j in sorted(k for k in L.brackets if k >= 2):
            if i + j - 1 > max_arity:
                continue
            for key, inner in inner_tab.items():
                for ys in combinations_with_replacement(L.space.labels, j - 1):
                    checked += 1
                    val = bracket(L, j, [inner] + [{y: 1} for y in ys])
                    if val:
                        violations.append(
                            Violation(f"[[{','.join(key)}],{','.join(ys)}] ≠ 0", key + ys, val)
                        )
    return Report(not violations, violations, checked)


def abelian(space: GradedVectorSpace, name="L") -> LInfinityAlgebra:
    return LInfinityAlgebra(space, {}, name=name)
