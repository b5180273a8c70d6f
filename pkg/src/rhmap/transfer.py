"""Homotopy transfer of L∞-structures along a deformation retract.

Transferred brackets are sums over rooted trees: leaves carry the inclusion,
internal edges the homotopy, the root the projection, and every vertex of
arity r a bracket ℓ_r.  Each isomorphism class of trees is weighted by
1/|Aut(T)| after symmetrizing over all leaf labelings.

Evaluation happens on the suspension (see ``linfty``), where all brackets
are graded-symmetric of degree -1.  There the homotopy enters as h = -K: the
retract satisfies id - iq = ℓ_1 K + K ℓ_1, and the tree formula needs
iq - id = m_1 h + h m_1.  Every partial composite h∘m∘(...) then has degree
0, so the only signs are Koszul signs of permuting the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, permutations
from math import factorial
from typing import Mapping, Sequence

from .cdga import HomotopyRetract, complex_retract
from .errors import InputError
from .graded import GradedVectorSpace, Vec, koszul_sign, shuffles, vadd, vscale
from .linfty import LInfinityAlgebra, bracket, decalage_sign, sym_bracket, tensor_label


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class RootedTree:
    """A leaf (no children) or a vertex with ≥ 2 children, kept in canonical order."""

    children: tuple["RootedTree", ...] = ()

    @staticmethod
    def leaf() -> "RootedTree":
        return RootedTree(())

    @staticmethod
    def node(children) -> "RootedTree":
        children = tuple(sorted(children, key=lambda t: t.code))
        if len(children) == 1:
            raise InputError("internal vertices need at least two children")
        return RootedTree(children)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def code(self) -> str:
        return _code(self)

    @property
    def leaf_count(self) -> int:
        return 1 if self.is_leaf else sum(c.leaf_count for c in self.children)

    @property
    def internal_vertices(self) -> int:
        return 0 if self.is_leaf else 1 + sum(c.internal_vertices for c in self.children)

    @property
    def max_vertex_arity(self) -> int:
        if self.is_leaf:
            return 0
        return max([len(self.children)] + [c.max_vertex_arity for c in self.children])

    @property
    def aut_order(self) -> int:
        if self.is_leaf:
            return 1
        n = 1
        counts: dict[str, int] = {}
        for c in self.children:
            n *= c.aut_order
            counts[c.code] = counts.get(c.code, 0) + 1
        for m in counts.values():
            n *= factorial(m)
        return n

    def __str__(self):
        return self.code


@lru_cache(maxsize=None)
def _code(t: RootedTree) -> str:
    if not t.children:
        return "*"
    return "(" + "".join(_code(c) for c in t.children) + ")"


def _partitions(n: int, parts_max: int, largest: int):
    """Integer partitions of n into parts ≤ largest, at most parts_max parts, descending."""
    if n == 0:
        yield ()
        return
    if parts_max == 0:
        return
    for p in range(min(n, largest), 0, -1):
        for rest in _partitions(n - p, parts_max - 1, p):
            yield (p,) + rest


@lru_cache(maxsize=None)
def _trees(k: int, max_arity: int) -> tuple[RootedTree, ...]:
    if k == 1:
        return (RootedTree.leaf(),)
    found = {}
    for parts in _partitions(k, max_arity, k - 1):
        if len(parts) < 2:
            continue
        # group equal part sizes so each multiset of subtrees is produced once
        groups: dict[int, int] = {}
        for p in parts:
            groups[p] = groups.get(p, 0) + 1
        choices = [[]]
        for size, mult in groups.items():
            opts = list(combinations_with_replacement(_trees(size, max_arity), mult))
            choices = [c + list(o) for c in choices for o in opts]
        for ch in choices:
            t = RootedTree.node(ch)
            found[t.code] = t
    return tuple(found[c] for c in sorted(found, key=lambda c: (c.count("("), c)))


def enumerate_trees(k: int, max_arity: int | None = None) -> list[tuple[RootedTree, int]]:
    """Isomorphism classes of rooted trees with k leaves and vertex arities in [2, max_arity]."""
    if k < 2:
        raise InputError("trees for transferred brackets have at least two leaves")
    max_arity = k if max_arity is None else max_arity
    return [(t, t.aut_order) for t in _trees(k, max_arity)]


def labeled_tree_count(k: int) -> int:
    """Leaf-labeled rooted trees (vertex arity ≥ 2) with k leaves, by direct recursion on set partitions."""

    @lru_cache(maxsize=None)
    def count(n: int) -> int:
        if n == 1:
            return 1
        return sum(_block_products(n, count))

    return count(k)


def _block_products(n: int, count):
    # every set partition of {0..n-1} into ≥ 2 blocks contributes Π count(|block|)
    for blocks in set_partitions(tuple(range(n))):
        if len(blocks) >= 2:
            p = 1
            for b in blocks:
                p *= count(len(b))
            yield p


def set_partitions(items: tuple):
    """All set partitions; blocks ordered by their first element."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in set_partitions(rest):
        yield [(first,)] + sub
        for i in range(len(sub)):
            yield sub[:i] + [(first,) + sub[i]] + sub[i + 1:]


# ---------------------------------------------------------------------------
# transfer problems


@dataclass(frozen=True)
class TransferProblem:
    ambient: LInfinityAlgebra
    target: GradedVectorSpace
    include: Mapping[str, Vec]
    project: Mapping[str, Vec]
    homotopy: Mapping[str, Vec]

    def i(self, v: Mapping) -> Vec:
        return _apply(self.include, v)

    def q(self, v: Mapping) -> Vec:
        return _apply(self.project, v)

    def h(self, v: Mapping) -> Vec:
        return vscale(_apply(self.homotopy, v), -1)

    def violations(self) -> list[str]:
        amb = self.ambient
        bad = []
        for t in self.target.labels:
            if vadd(self.q(self.i({t: 1})), {t: 1}, -1):
                bad.append(f"q∘i ≠ id at {t}")
        for a in amb.space.labels:
            e = {a: Fraction(1)}
            lhs = vadd(dict(e), self.i(self.q(e)), -1)
            K = lambda v: _apply(self.homotopy, v)
            d = lambda v: bracket(amb, 1, [v]) if v else {}
            rhs = vadd(d(K(e)), K(d(e)))
            if vadd(lhs, rhs, -1):
                bad.append(f"id - i∘q ≠ ℓ_1K + Kℓ_1 at {a}")
            if self.q(K(e)):
                bad.append(f"q∘K ≠ 0 at {a}")
            if K(K(e)):
                bad.append(f"K∘K ≠ 0 at {a}")
        return bad


def _apply(table: Mapping[str, Mapping], v: Mapping) -> Vec:
    out: Vec = {}
    for k, c in v.items():
        img = table.get(k)
        if img:
            vadd(out, img, c)
    return out


def problem_from_retract(ambient: LInfinityAlgebra, r: HomotopyRetract) -> TransferProblem:
    return TransferProblem(ambient, r.homology, dict(r.include), dict(r.project), dict(r.homotopy))


def minimal_problem(ambient: LInfinityAlgebra) -> TransferProblem:
    """Retract of (ambient, ℓ_1) onto its homology (homological grading)."""
    diff = {key[0]: v for key, v in ambient.brackets.get(1, {}).items()}
    r = complex_retract(ambient.space, diff, step=-1)
    return problem_from_retract(ambient, r)


def tensor_problem(ambient: LInfinityAlgebra, r: HomotopyRetract, L: LInfinityAlgebra) -> TransferProblem:
    """(i⊗id, q⊗id, K⊗id) on A⊗L from a retract of the CDGA A (L minimal)."""
    if not L.is_minimal:
        raise InputError("tensoring a CDGA retract with L needs ℓ_1 = 0 on L")
    target = GradedVectorSpace(
        tuple((tensor_label(h, l), dl - dh) for h, dh in r.homology for l, dl in L.space)
    )

    def lift(table):
        out = {}
        for a, img in table.items():
            for l in L.space.labels:
                out[tensor_label(a, l)] = {tensor_label(b, l): c for b, c in img.items()}
        return out

    return TransferProblem(ambient, target, lift(r.include), lift(r.project), lift(r.homotopy))


# ---------------------------------------------------------------------------
# evaluation


def _sdeg(space: GradedVectorSpace, label: str) -> int:
    return space.degree(label) + 1


def _planar(t: RootedTree, P: TransferProblem, args: Sequence[Mapping]) -> Vec:
    """m_T on the suspension for one planar embedding, before q (root output in the ambient)."""
    pos = 0
    inputs = []
    for c in t.children:
        n = c.leaf_count
        block = args[pos:pos + n]
        pos += n
        if c.is_leaf:
            inputs.append(P.i(block[0]))
        else:
            inputs.append(P.h(_planar(c, P, block)))
        if not inputs[-1]:
            return {}
    return sym_bracket(P.ambient, len(t.children), inputs)


def eval_tree(t: RootedTree, P: TransferProblem, args: Sequence[str]) -> Vec:
    """ℓ_T on target basis labels, symmetrized over all leaf labelings (not yet divided by |Aut T|)."""
    if len(args) != t.leaf_count:
        raise InputError(f"tree {t} has {t.leaf_count} leaves, got {len(args)} arguments")
    bound = P.ambient.arity_bound
    if bound is not None and t.max_vertex_arity > bound:
        raise InputError(f"tree {t} has a vertex of arity {t.max_vertex_arity} > arity bound {bound}")
    sdegs = [_sdeg(P.target, a) for a in args]
    out: Vec = {}
    for perm in permutations(range(len(args))):
        val = _planar(t, P, [{args[p]: Fraction(1)} for p in perm])
        if val:
            vadd(out, P.q(val), koszul_sign(perm, sdegs))
    return vscale(out, decalage_sign([P.target.degree(a) for a in args]))


class _Recursive:
    """Labeled-tree sums via nested set partitions, memoized on input words."""

    def __init__(self, P: TransferProblem, max_vertex: int):
        self.P = P
        self.max_vertex = max_vertex
        self.lam: dict[tuple, Vec] = {}
        self.sdeg = {l: d + 1 for l, d in P.target}

    def M(self, word: tuple) -> Vec:
        out: Vec = {}
        n = len(word)
        degs = [self.sdeg[w] for w in word]
        for blocks in set_partitions(tuple(range(n))):
            r = len(blocks)
            if r < 2 or r > self.max_vertex or r not in self.P.ambient.brackets:
                continue
            ins = []
            for b in blocks:
                v = self.Lam(tuple(word[p] for p in b))
                if not v:
                    break
                ins.append(v)
            else:
                val = sym_bracket(self.P.ambient, r, ins)
                if val:
                    perm = [p for b in blocks for p in b]
                    vadd(out, val, koszul_sign(perm, degs))
        return out

    def Lam(self, word: tuple) -> Vec:
        if len(word) == 1:
            return self.P.i({word[0]: Fraction(1)})
        got = self.lam.get(word)
        if got is None:
            got = self.P.h(self.M(word))
            self.lam[word] = got
        return got


def input_words(target: GradedVectorSpace, n: int):
    present = set(target.degrees())
    labels = target.labels
    for combo in combinations_with_replacement(range(len(labels)), n):
        word = tuple(labels[c] for c in combo)
        if any(a == b and target.degree(a) % 2 == 0 for a, b in zip(word, word[1:])):
            continue
        if sum(target.degree(w) for w in word) + n - 2 not in present:
            continue
        yield word


def transfer(P: TransferProblem, max_arity: int, method: str = "partitions") -> LInfinityAlgebra:
    """Transferred L∞-structure on the target, brackets up to ``max_arity``.

    ``method="trees"`` sums ℓ_T/|Aut T| over isomorphism classes of trees
    with full leaf symmetrization; ``"partitions"`` sums over leaf-labeled
    trees directly and is much faster.  Both give the same table.
    """
    amb = P.ambient
    vbound = amb.arity_bound or max(amb.brackets, default=1)
    br: dict[int, dict] = {}
    one = {}
    if 1 in amb.brackets:
        for t in P.target.labels:
            v = P.q(bracket(amb, 1, [P.i({t: 1})]))
            if v:
                one[(t,)] = v
    if one:
        br[1] = one
    rec = _Recursive(P, vbound)
    trees = {}
    for n in range(2, max_arity + 1):
        tab = {}
        if method == "trees":
            trees[n] = enumerate_trees(n, vbound)
        for word in input_words(P.target, n):
            if method == "trees":
                val: Vec = {}
                for t, aut in trees[n]:
                    vadd(val, eval_tree(t, P, word), Fraction(1, aut))
            elif method == "partitions":
                val = vscale(P.q(rec.M(word)), decalage_sign([P.target.degree(w) for w in word]))
            else:
                raise InputError(f"unknown transfer method {method!r}")
            if val:
                tab[word] = val
        if tab:
            br[n] = tab
    return LInfinityAlgebra(P.target, br, arity_bound=max_arity, name=f"transfer({amb.name})")


def tree_contributions(P: TransferProblem, word: Sequence[str], max_vertex: int | None = None) -> dict[str, Vec]:
    """Per-tree pieces ℓ_T/|Aut T| of a transferred bracket (nonzero ones only)."""
    vbound = max_vertex or P.ambient.arity_bound or len(word)
    out = {}
    for t, aut in enumerate_trees(len(word), min(vbound, len(word))):
        v = vscale(eval_tree(t, P, word), Fraction(1, aut))
        if v:
            out[t.code] = v
    return out


def multi_vertex_residuals(P: TransferProblem, max_arity: int) -> list[tuple[str, tuple, Vec]]:
    """Every (tree, input word) with ≥ 2 internal vertices whose evaluation is nonzero."""
    vbound = P.ambient.arity_bound or max_arity
    bad = []
    for n in range(3, max_arity + 1):
        trees = [t for t, _ in enumerate_trees(n, min(vbound, n)) if t.internal_vertices >= 2]
        for word in input_words(P.target, n):
            for t in trees:
                v = eval_tree(t, P, word)
                if v:
                    bad.append((t.code, word, v))
    return bad


def transferred_morphism_defect(P: TransferProblem, transferred: LInfinityAlgebra, word: Sequence[str]) -> Vec:
    """Defect of the L∞-morphism equation for I = (i, h∘m∘..., ...) on one input word.

    Zero for a correct transfer; used in tests to pin the homotopy sign.
    Works on the suspension: Σ m_r(I(B_1),...,I(B_r)) - Σ ± I_j(m'_i(...), ...).
    """
    rec = _Recursive(P, P.ambient.arity_bound or len(word))
    sdeg = {l: d + 1 for l, d in P.target}
    word = tuple(word)
    n = len(word)
    degs = [sdeg[w] for w in word]

    def I(sub: tuple) -> Vec:
        return rec.Lam(sub)

    lhs: Vec = {}
    for blocks in set_partitions(tuple(range(n))):
        r = len(blocks)
        if r not in P.ambient.brackets:
            continue
        ins = [I(tuple(word[p] for p in b)) for b in blocks]
        if all(ins):
            val = sym_bracket(P.ambient, r, ins)
            perm = [p for b in blocks for p in b]
            vadd(lhs, val, koszul_sign(perm, degs))
    rhs: Vec = {}
    for i in range(1, n + 1):
        if i not in transferred.brackets:
            continue
        for sh in shuffles(i, n - i):
            inner_word = [word[p] for p in sh.perm[:i]]
            inner = vscale(
                bracket(transferred, i, [{w: 1} for w in inner_word]),
                decalage_sign([P.target.degree(w) for w in inner_word]),
            )
            if not inner:
                continue
            rest = [word[p] for p in sh.perm[i:]]
            s = sh.koszul(degs)
            for lab, c in inner.items():
                seq = [lab] + rest
                sub = tuple(sorted(seq, key=P.target.index))
                perm = sorted(range(len(seq)), key=lambda p: (P.target.index(seq[p]), p))
                ks = koszul_sign(perm, [sdeg[x] for x in seq])
                vadd(rhs, I(sub), c * s * ks)
    return vadd(lhs, rhs, -1)
