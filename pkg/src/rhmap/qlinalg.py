"""Exact linear algebra over Q.

Everything downstream (homology ranks, retracts, structure constants) goes
through this module, so it never touches floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError

Rational = Fraction


def to_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; use Fraction or int")
    return Fraction(x)


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows:
            raise InputError(f"expected {self.rows} rows, got {len(self.entries)}")
        for r in self.entries:
            if len(r) != self.cols:
                raise InputError(f"row of length {len(r)} in a {self.cols}-column matrix")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], cols: int | None = None) -> "RationalMatrix":
        data = tuple(tuple(to_rational(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        z = Fraction(0)
        return cls(rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "RationalMatrix":
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], len(columns))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix.from_rows(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows
        )

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise InputError(f"vector of length {len(v)} for {self.rows}x{self.cols} matrix")
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in self.entries)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise InputError("shape mismatch in matrix product")
        cols = [other.column(j) for j in range(other.cols)]
        return RationalMatrix.from_rows(
            [[sum((a * c[k] for k, a in enumerate(r) if a), Fraction(0)) for c in cols]
             for r in self.entries],
            other.cols,
        )

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)


def rref(m: RationalMatrix) -> tuple[int, RationalMatrix, list[int]]:
    """Reduced row echelon form; pivots are the leftmost nonzero entries, taking the first row."""
    a = [list(r) for r in m.entries]
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        if r == m.rows:
            break
        p = next((i for i in range(r, m.rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return len(pivots), RationalMatrix.from_rows(a, m.cols), pivots


def rank(m: RationalMatrix) -> int:
    return rref(m)[0]


def kernel_basis(m: RationalMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of the null space, one vector per free column (free entry set to 1)."""
    rk, red, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -red.entries[row][f]
        basis.append(tuple(v))
    return basis


def image_basis(m: RationalMatrix) -> list[tuple[Fraction, ...]]:
    """Pivot columns of m: a basis of its column space."""
    _, _, pivots = rref(m)
    return [m.column(c) for c in pivots]


def solve(m: RationalMatrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """One exact solution of m x = b (free variables set to 0), or None."""
    if len(b) != m.rows:
        raise InputError(f"right-hand side has length {len(b)}, matrix has {m.rows} rows")
    aug = RationalMatrix.from_rows(
        [list(r) + [to_rational(x)] for r, x in zip(m.entries, b)], m.cols + 1
    )
    _, red, pivots = rref(aug)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [Fraction(0)] * m.cols
    for row, pc in enumerate(pivots):
        x[pc] = red.entries[row][m.cols]
    return tuple(x)


def extend_to_basis(
    span: Sequence[Sequence], candidates: Sequence[Sequence], dim: int
) -> list[tuple[Fraction, ...]]:
    """Greedily pick candidates independent of `span` (and of each other).

    Returns only the picked candidates, in the order they were accepted.
    """
    current = [tuple(to_rational(x) for x in v) for v in span]
    r = rank(RationalMatrix.from_rows(current, dim)) if current else 0
    picked = []
    for c in candidates:
        c = tuple(to_rational(x) for x in c)
        trial = current + [c]
        rt = rank(RationalMatrix.from_rows(trial, dim))
        if rt > r:
            current, r = trial, rt
            picked.append(c)
    return picked


def inverse(m: RationalMatrix) -> RationalMatrix:
    if m.rows != m.cols:
        raise InputError("only square matrices are invertible")
    n = m.rows
    aug = RationalMatrix.from_rows(
        [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(m.entries)], 2 * n
    )
    _, red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise InputError("matrix is singular")
    return RationalMatrix.from_rows([r[n:] for r in red.entries], n)
