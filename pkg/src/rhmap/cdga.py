"""Finite CDGAs, free Sullivan algebras and homotopy retracts.

Degrees here are cohomological: differentials raise degree by one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InputError, InvariantError, NotTwoStage
from .graded import GradedVectorSpace, Vec, render_vec, vadd, vclean, vscale
from .qlinalg import RationalMatrix, extend_to_basis, inverse, kernel_basis

UNIT = "1"


@dataclass(frozen=True)
class FiniteCdga:
    """Finite-dimensional CDGA given by structure constants.

    ``product`` holds a*b for (some) basis pairs not involving the unit; missing
    pairs are zero.  ``differential`` maps basis labels to their images.
    """

    space: GradedVectorSpace
    product: Mapping[tuple[str, str], Vec] = field(default_factory=dict)
    differential: Mapping[str, Vec] = field(default_factory=dict)
    name: str = "A"

    def __post_init__(self):
        if UNIT not in self.space or self.space.degree(UNIT) != 0:
            raise InputError("a CDGA needs the unit '1' in degree 0")
        prod = {}
        for (a, b), v in self.product.items():
            if a == UNIT or b == UNIT:
                continue
            v = vclean(v)
            if v:
                prod[(a, b)] = v
        object.__setattr__(self, "product", prod)
        object.__setattr__(self, "differential", {k: vclean(v) for k, v in self.differential.items() if vclean(v)})

    # -- arithmetic on sparse vectors ------------------------------------
    def deg(self, label: str) -> int:
        return self.space.degree(label)

    def mul_basis(self, a: str, b: str) -> Vec:
        if a == UNIT:
            return {b: Fraction(1)}
        if b == UNIT:
            return {a: Fraction(1)}
        return self.product.get((a, b), {})

    def mul(self, u: Mapping, v: Mapping) -> Vec:
        out: Vec = {}
        for a, ca in u.items():
            for b, cb in v.items():
                vadd(out, self.mul_basis(a, b), ca * cb)
        return out

    def d(self, u: Mapping) -> Vec:
        out: Vec = {}
        for a, c in u.items():
            vadd(out, self.differential.get(a, {}), c)
        return out

    @property
    def is_formal_presentation(self) -> bool:
        """True when the differential vanishes (e.g. a cohomology algebra)."""
        return not self.differential

    def positive_nilpotency(self) -> int:
        """Longest nonzero product of positive-degree basis elements (0 if none)."""
        pos = [l for l, d in self.space if d > 0]
        if not pos:
            return 0
        labels = self.space.labels
        dim = len(labels)
        power = [{l: Fraction(1)} for l in pos]
        length = 1
        while length <= dim:
            prods = [self.mul(v, {l: 1}) for v in power for l in pos]
            vecs = [tuple(Fraction(p.get(l, 0)) for l in labels) for p in prods if p]
            basis = extend_to_basis([], vecs, dim)
            if not basis:
                return length
            power = [vclean(dict(zip(labels, b))) for b in basis]
            length += 1
        raise InvariantError("positive part of the algebra is not nilpotent")

    # -- invariants ----------------------------------------------------
    def check(self) -> None:
        """Raise InvariantError naming the first failing identity."""
        sp = self.space
        labels = sp.labels
        for (a, b), v in self.product.items():
            for l in v:
                if sp.degree(l) != sp.degree(a) + sp.degree(b):
                    raise InvariantError(f"product {a}*{b} has a term {l} of the wrong degree", (a, b))
        for a, v in self.differential.items():
            for l in v:
                if sp.degree(l) != sp.degree(a) + 1:
                    raise InvariantError(f"d({a}) has a term {l} of the wrong degree", (a,))
        if self.differential.get(UNIT):
            raise InvariantError("d(1) must vanish", (UNIT,))
        for a in labels:
            if self.d(self.d({a: 1})):
                raise InvariantError(f"d∘d({a}) ≠ 0", (a,))
        for a in labels:
            for b in labels:
                ab = self.mul_basis(a, b)
                ba = self.mul_basis(b, a)
                s = -1 if (sp.degree(a) * sp.degree(b)) & 1 else 1
                if vadd(dict(ab), ba, -s):
                    raise InvariantError(f"graded commutativity fails on ({a}, {b})", (a, b))
        for a in labels:
            for b in labels:
                ab = self.mul_basis(a, b)
                for c in labels:
                    lhs = self.mul(ab, {c: 1})
                    rhs = self.mul({a: 1}, self.mul_basis(b, c))
                    if vadd(lhs, rhs, -1):
                        raise InvariantError(f"associativity fails on ({a}, {b}, {c})", (a, b, c))
        for a in labels:
            for b in labels:
                lhs = self.d(self.mul_basis(a, b))
                rhs = self.mul(self.d({a: 1}), {b: 1})
                s = -1 if sp.degree(a) & 1 else 1
                vadd(rhs, self.mul({a: 1}, self.d({b: 1})), s)
                if vadd(lhs, rhs, -1):
                    raise InvariantError(f"Leibniz rule fails on ({a}, {b})", (a, b))


# ---------------------------------------------------------------------------
# homotopy retracts of finite complexes


@dataclass(frozen=True)
class HomotopyRetract:
    """Deformation retract (i, q, K) of a finite complex onto its homology.

    ``step`` is the degree of the differential (+1 cohomological, -1
    homological); K has degree -step.  Maps are stored on basis labels.
    """

    ambient_space: GradedVectorSpace
    differential: Mapping[str, Vec]
    homology: GradedVectorSpace
    include: Mapping[str, Vec]
    project: Mapping[str, Vec]
    homotopy: Mapping[str, Vec]
    step: int = 1
    ambient: FiniteCdga | None = None

    def i(self, v: Mapping) -> Vec:
        return _apply(self.include, v)

    def q(self, v: Mapping) -> Vec:
        return _apply(self.project, v)

    def K(self, v: Mapping) -> Vec:
        return _apply(self.homotopy, v)

    def d(self, v: Mapping) -> Vec:
        return _apply(self.differential, v)

    def violations(self) -> list[str]:
        """Every failing retract identity, as readable strings (empty when sound)."""
        bad = []
        for h in self.homology.labels:
            if vadd(self.q(self.i({h: 1})), {h: 1}, -1):
                bad.append(f"q∘i ≠ id at {h}")
            if self.K(self.i({h: 1})):
                bad.append(f"K∘i ≠ 0 at {h}")
        for a in self.ambient_space.labels:
            e = {a: Fraction(1)}
            lhs = vadd(dict(e), self.i(self.q(e)), -1)
            rhs = vadd(self.d(self.K(e)), self.K(self.d(e)))
            if vadd(lhs, rhs, -1):
                bad.append(f"id - i∘q ≠ dK + Kd at {a}")
            if self.q(self.K(e)):
                bad.append(f"q∘K ≠ 0 at {a}")
            if self.K(self.K(e)):
                bad.append(f"K∘K ≠ 0 at {a}")
        return bad


def _apply(table: Mapping[str, Mapping], v: Mapping) -> Vec:
    out: Vec = {}
    for k, c in v.items():
        img = table.get(k)
        if img:
            vadd(out, img, c)
    return out


def _homology_label(deg: int, k: int) -> str:
    return f"c{deg}_{k}".replace("-", "m")


def complex_retract(
    space: GradedVectorSpace, differential: Mapping[str, Mapping], step: int = 1, ambient=None
) -> HomotopyRetract:
    """Split every degree as C ⊕ dC ⊕ H and build the retract onto H.

    C completes the cycles using standard basis vectors; dC is spanned by the
    images of that completion, so K sends d(c) back to c; H completes dC
    inside the cycles, standard basis vectors preferred.
    """
    diff = {k: vclean(v) for k, v in differential.items()}
    degrees = space.degrees()
    slices = {n: space.slice(n) for n in degrees}

    def dmatrix(n):
        src, tgt = slices.get(n, []), slices.get(n + step, [])
        cols = [[diff.get(s, {}).get(t, 0) for t in tgt] for s in src]
        return RationalMatrix.from_columns(cols, len(tgt)) if src else None

    cycles, compl = {}, {}
    for n in degrees:
        dim = len(slices[n])
        m = dmatrix(n)
        if m is None or m.rows == 0:
            z = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
        else:
            z = kernel_basis(m)
        cycles[n] = z
        units = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
        compl[n] = extend_to_basis(z, units, dim)

    include, project, homotopy = {}, {}, {}
    hbasis = []
    for n in degrees:
        labels = slices[n]
        dim = len(labels)
        src = n - step
        cs = compl.get(src, [])
        bvecs, cvecs_src = [], []
        for c in cs:
            cv = dict(zip(slices[src], c))
            img = _apply(diff, vclean(cv))
            bvecs.append(tuple(Fraction(img.get(l, 0)) for l in labels))
            cvecs_src.append(vclean(cv))
        units = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
        zset = cycles[n]
        unit_cycles = [u for u in units if _in_span(u, zset, dim)]
        hv = extend_to_basis(bvecs, unit_cycles + list(zset), dim)
        hlabels = []
        for k, v in enumerate(hv):
            nz = [(l, c) for l, c in zip(labels, v) if c]
            if len(nz) == 1 and nz[0][1] == 1:
                hl = nz[0][0]
            else:
                hl = _homology_label(n, k)
            hlabels.append(hl)
            hbasis.append((hl, n))
            include[hl] = vclean(dict(zip(labels, v)))
        full = list(compl[n]) + bvecs + hv
        if len(full) != dim:
            raise InvariantError(f"degree {n}: decomposition has {len(full)} vectors for dimension {dim}")
        if dim == 0:
            continue
        minv = inverse(RationalMatrix.from_columns(full, dim))
        nc, nb = len(compl[n]), len(bvecs)
        for j, l in enumerate(labels):
            coords = minv.column(j)
            project[l] = vclean({hlabels[k]: coords[nc + nb + k] for k in range(len(hv))})
            kv: Vec = {}
            for k in range(nb):
                vadd(kv, cvecs_src[k], coords[nc + k])
            homotopy[l] = kv
    return HomotopyRetract(
        ambient_space=space,
        differential=diff,
        homology=GradedVectorSpace(tuple(hbasis)),
        include=include,
        project={k: v for k, v in project.items() if v},
        homotopy={k: v for k, v in homotopy.items() if v},
        step=step,
        ambient=ambient,
    )


def _in_span(v, vecs, dim) -> bool:
    if not vecs:
        return not any(v)
    return not extend_to_basis(vecs, [v], dim)


def harmonious_decomposition(A: FiniteCdga) -> HomotopyRetract:
    return complex_retract(A.space, A.differential, step=1, ambient=A)


def cohomology(A: FiniteCdga, retract: HomotopyRetract | None = None) -> FiniteCdga:
    """H(A) with zero differential and product q(i(a) i(b))."""
    A.check()
    r = retract or harmonious_decomposition(A)
    H = r.homology
    prod = {}
    for a in H.labels:
        for b in H.labels:
            if UNIT in (a, b):
                continue
            v = r.q(A.mul(r.i({a: 1}), r.i({b: 1})))
            if v:
                prod[(a, b)] = v
    return FiniteCdga(H, prod, {}, name=f"H({A.name})")


# ---------------------------------------------------------------------------
# free graded-commutative algebras

Monomial = tuple  # generator labels in generator order; odd ones at most once
Poly = dict  # Monomial -> Fraction


def _mono_mul(m1: Monomial, m2: Monomial, order: Mapping[str, int], deg: Mapping[str, int]):
    """Product of two monomials as (sign, monomial), or (0, None) if it vanishes."""
    seq = list(m1) + list(m2)
    # insertion sort, tracking Koszul sign of each transposition
    sign = 1
    for i in range(1, len(seq)):
        j = i
        while j > 0 and order[seq[j - 1]] > order[seq[j]]:
            if deg[seq[j - 1]] & 1 and deg[seq[j]] & 1:
                sign = -sign
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            j -= 1
    for a, b in zip(seq, seq[1:]):
        if a == b and deg[a] & 1:
            return 0, None
    return sign, tuple(seq)


def poly_str(p: Mapping[Monomial, Fraction]) -> str:
    if not p:
        return "0"
    return render_vec({"*".join(m) if m else "1": c for m, c in p.items()})


@dataclass(frozen=True)
class SullivanAlgebra:
    """Free graded-commutative algebra ΛV with a differential on generators."""

    generators: GradedVectorSpace
    differential: Mapping[str, Poly] = field(default_factory=dict)
    name: str = "S"
    validate: bool = True

    def __post_init__(self):
        for l, d in self.generators:
            if d <= 0:
                raise InputError(f"generator {l} has degree {d}; Sullivan generators need degree >= 1")
        order = {l: i for i, l in enumerate(self.generators.labels)}
        deg = dict(self.generators.basis)
        object.__setattr__(self, "_order", order)
        object.__setattr__(self, "_deg", deg)
        clean = {}
        for v, p in self.differential.items():
            if v not in order:
                raise InputError(f"differential given for unknown generator {v!r}")
            q: Poly = {}
            for m, c in p.items():
                s, mm = self.normalize(m)
                if s:
                    q[mm] = q.get(mm, 0) + s * Fraction(c)
            q = {m: c for m, c in q.items() if c}
            if q:
                clean[v] = q
        object.__setattr__(self, "differential", clean)
        if self.validate:
            self.check()

    def normalize(self, m: Sequence[str]):
        for g in m:
            if g not in self._order:
                raise InputError(f"unknown generator {g!r}")
        return _mono_mul((), tuple(m), self._order, self._deg)

    def deg(self, g: str) -> int:
        return self._deg[g]

    def mono_degree(self, m: Monomial) -> int:
        return sum(self._deg[g] for g in m)

    def mul(self, p: Mapping, q: Mapping) -> Poly:
        out: Poly = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                s, m = _mono_mul(m1, m2, self._order, self._deg)
                if s:
                    x = out.get(m, 0) + s * c1 * c2
                    if x:
                        out[m] = x
                    else:
                        out.pop(m, None)
        return out

    def d(self, p: Mapping) -> Poly:
        """Extend the differential as a degree +1 derivation."""
        out: Poly = {}
        for m, c in p.items():
            prefix_deg = 0
            for k, g in enumerate(m):
                dg = self.differential.get(g)
                if dg:
                    sign = -1 if prefix_deg & 1 else 1
                    term = self.mul(self.mul({m[:k]: Fraction(1)}, dg), {m[k + 1:]: Fraction(1)})
                    vadd(out, term, sign * c)
                prefix_deg += self._deg[g]
        return out

    def check(self) -> None:
        for v in self.generators.labels:
            dv = self.differential.get(v, {})
            for m in dv:
                if self.mono_degree(m) != self._deg[v] + 1:
                    raise InvariantError(f"d({v}) has a term {'*'.join(m)} of the wrong degree", v)
                if len(m) == 0:
                    raise InvariantError(f"d({v}) has a constant term", v)
        for v in self.generators.labels:
            if self.d(self.differential.get(v, {})):
                raise InvariantError(f"d∘d({v}) = {poly_str(self.d(self.differential[v]))} ≠ 0", v)

    def dv(self, v: str) -> Poly:
        return dict(self.differential.get(v, {}))

    def monomials(self, degree: int, min_length: int = 0) -> list[Monomial]:
        """All nonzero normalized monomials of the given degree."""
        gens = self.generators.labels
        out = []

        def rec(start, remaining, acc):
            if remaining == 0:
                if len(acc) >= min_length:
                    out.append(tuple(acc))
                return
            for k in range(start, len(gens)):
                g = gens[k]
                dg = self._deg[g]
                if dg > remaining:
                    continue
                if dg & 1 and acc and acc[-1] == g:
                    continue
                rec(k, remaining - dg, acc + [g])

        rec(0, degree, [])
        return [m for m in out if _mono_mul((), m, self._order, self._deg)[0]]


def wordlength_parts(S: SullivanAlgebra) -> dict[str, dict[int, Poly]]:
    """d_k v for every generator v and every k with d_k v ≠ 0."""
    out = {}
    for v in S.generators.labels:
        parts: dict[int, Poly] = {}
        for m, c in S.differential.get(v, {}).items():
            parts.setdefault(len(m), {})[m] = c
        out[v] = dict(sorted(parts.items()))
    return out


def is_minimal(S: SullivanAlgebra) -> bool:
    return all(1 not in parts for parts in wordlength_parts(S).values())


def two_stage_split(S: SullivanAlgebra) -> tuple[list[str], list[str]]:
    """(P, Q) with dP = 0 and dQ ⊂ ΛP, or NotTwoStage naming the culprit."""
    P = [v for v in S.generators.labels if not S.differential.get(v)]
    pset = set(P)
    Q = []
    for v in S.generators.labels:
        if v in pset:
            continue
        for m in S.differential[v]:
            bad = [g for g in m if g not in pset]
            if bad:
                raise NotTwoStage(v, f"{bad[0]} is not closed")
        Q.append(v)
    return P, Q


def free_model_text(S: SullivanAlgebra) -> str:
    lines = [f"{v} : {S.deg(v)}, d{v} = {poly_str(S.differential.get(v, {}))}" for v in S.generators.labels]
    return "\n".join(lines)
