"""Graded vector spaces over Q, Koszul signs and shuffles.

Elements are sparse: a mapping from basis label to a nonzero Fraction.
Internally the algebra code works on plain dicts (``Vec``) for speed; the
``GradedElement`` wrapper is the public face.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from .errors import InputError

Vec = dict  # label -> Fraction, zero coefficients never stored


def vadd(acc: Vec, v: Mapping, scale=1) -> Vec:
    """acc += scale * v, in place."""
    if not scale:
        return acc
    for k, c in v.items():
        x = acc.get(k, 0) + scale * c
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)
    return acc


def vscale(v: Mapping, scale) -> Vec:
    if not scale:
        return {}
    return {k: c * scale for k, c in v.items()}


def vclean(v: Mapping) -> Vec:
    return {k: Fraction(c) for k, c in v.items() if c}


@dataclass(frozen=True)
class GradedVectorSpace:
    """Finite graded space with labeled basis, ordered by (degree, label)."""

    basis: tuple[tuple[str, int], ...]
    _index: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        b = tuple(sorted(((str(l), int(d)) for l, d in self.basis), key=lambda t: (t[1], t[0])))
        labels = [l for l, _ in b]
        if len(set(labels)) != len(labels):
            dup = sorted({l for l in labels if labels.count(l) > 1})
            raise InputError(f"duplicate basis labels: {dup}")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "_index", {l: i for i, l in enumerate(labels)})

    @classmethod
    def of(cls, pairs: Iterable[tuple[str, int]] | Mapping[str, int]) -> "GradedVectorSpace":
        if isinstance(pairs, Mapping):
            pairs = pairs.items()
        return cls(tuple(pairs))

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __contains__(self, label):
        return label in self._index

    @property
    def labels(self) -> list[str]:
        return [l for l, _ in self.basis]

    def degree(self, label: str) -> int:
        try:
            return self.basis[self._index[label]][1]
        except KeyError:
            raise InputError(f"unknown basis label {label!r}") from None

    def index(self, label: str) -> int:
        return self._index[label]

    def degrees(self) -> list[int]:
        return sorted({d for _, d in self.basis})

    def slice(self, degree: int) -> list[str]:
        return [l for l, d in self.basis if d == degree]

    def dimensions(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for _, d in self.basis:
            out[d] = out.get(d, 0) + 1
        return out

    def element(self, terms: Mapping[str, object]) -> "GradedElement":
        return GradedElement.of(self, terms)

    def to_vector(self, v: Mapping, labels: Sequence[str] | None = None) -> list[Fraction]:
        labels = self.labels if labels is None else labels
        return [Fraction(v.get(l, 0)) for l in labels]


@dataclass(frozen=True)
class GradedElement:
    terms: Mapping[str, Fraction]
    homogeneous_degree: int | None = None

    @classmethod
    def of(cls, space: GradedVectorSpace | None, terms: Mapping[str, object]) -> "GradedElement":
        t = vclean(terms)
        deg = None
        if space is not None:
            degs = {space.degree(l) for l in t}
            if len(degs) == 1:
                deg = degs.pop()
        return cls(t, deg)

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: "GradedElement") -> "GradedElement":
        return GradedElement(vadd(dict(self.terms), other.terms), self.homogeneous_degree)

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return GradedElement(vadd(dict(self.terms), other.terms, -1), self.homogeneous_degree)

    def __neg__(self):
        return GradedElement(vscale(self.terms, -1), self.homogeneous_degree)

    def __rmul__(self, c):
        return GradedElement(vscale(self.terms, Fraction(c)), self.homogeneous_degree)

    def __eq__(self, other):
        if isinstance(other, GradedElement):
            return dict(self.terms) == dict(other.terms)
        if isinstance(other, Mapping):
            return dict(self.terms) == vclean(other)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self):
        return render_vec(self.terms)


def render_vec(v: Mapping) -> str:
    if not v:
        return "0"
    parts = []
    for k in sorted(v):
        c = v[k]
        if c == 1:
            parts.append(f"+{k}")
        elif c == -1:
            parts.append(f"-{k}")
        else:
            s = str(c)
            parts.append(f"{'' if s.startswith('-') else '+'}{s}*{k}")
    out = "".join(parts)
    return out[1:] if out.startswith("+") else out


def koszul_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign picked up by rearranging graded symbols.

    ``perm[j]`` is the input position of the symbol that ends up in slot ``j``;
    every pair of symbols that gets crossed contributes (-1)^(|a||b|).
    """
    if len(perm) != len(degrees):
        raise InputError("permutation and degree list differ in length")
    if sorted(perm) != list(range(len(perm))):
        raise InputError(f"{list(perm)} is not a permutation")
    odd = 0
    n = len(perm)
    for a in range(n):
        pa = perm[a]
        if not degrees[pa] & 1:
            continue
        for b in range(a + 1, n):
            pb = perm[b]
            if pb < pa and degrees[pb] & 1:
                odd ^= 1
    return -1 if odd else 1


def permutation_sign(perm: Sequence[int]) -> int:
    inv = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[b] < perm[a])
    return -1 if inv & 1 else 1


def antisymmetric_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """sgn(perm) times the Koszul sign: the sign rule for antisymmetric brackets."""
    return permutation_sign(perm) * koszul_sign(perm, degrees)


@dataclass(frozen=True)
class Shuffle:
    perm: tuple[int, ...]
    split: int

    def koszul(self, degrees: Sequence[int]) -> int:
        return koszul_sign(self.perm, degrees)

    def sign(self, degrees: Sequence[int]) -> int:
        return antisymmetric_sign(self.perm, degrees)


def shuffles(i: int, j: int) -> list[Shuffle]:
    """All (i, j) shuffles: permutations increasing on the first i and on the last j slots."""
    if i < 0 or j < 0:
        raise InputError("shuffle block sizes must be nonnegative")
    n = i + j
    out = []
    for first in combinations(range(n), i):
        rest = tuple(k for k in range(n) if k not in first)
        out.append(Shuffle(first + rest, i))
    return out


def suspend(V: GradedVectorSpace, shift: int, decorate: Callable[[str], str] | None = None) -> GradedVectorSpace:
    """Shift every degree by ``shift``; labels optionally renamed by ``decorate``."""
    rename = decorate or (lambda s: s)
    return GradedVectorSpace(tuple((rename(l), d + shift) for l, d in V.basis))
