"""Small exact linear algebra over the rationals (lists of Fractions)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]

__all__ = [
    "Signature",
    "to_fraction_matrix",
    "identity",
    "matmul",
    "transpose",
    "inverse",
    "nullspace",
    "congruence_diagonalize",
    "sylvester_signature",
]


@dataclass(frozen=True)
class Signature:
    """Inertia of a real quadratic form: numbers of positive and negative squares."""

    pos: int
    neg: int

    @property
    def rank(self) -> int:
        return self.pos + self.neg

    def unordered(self) -> tuple[int, int]:
        # the invariant is defined only up to exchanging the two counts
        return tuple(sorted((self.pos, self.neg), reverse=True))

    def same_up_to_swap(self, other: "Signature") -> bool:
        return self.unordered() == other.unordered()

    def __str__(self):
        return f"({self.pos},{self.neg})"


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(map(Fraction, row)) + identity(n)[i] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def nullspace(a: Matrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {v : a v = 0} via reduced row echelon form."""
    rows = [list(map(Fraction, r)) for r in a]
    m = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    pivots: list[int] = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * m
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fcol]
        basis.append(v)
    return basis


def congruence_diagonalize(h: Sequence[Sequence]) -> tuple[Matrix, list[Fraction]]:
    """Return (S, D) with S^T H S = diag(D), positives first, then negatives, then zeros.

    Symmetric Gaussian elimination; everything stays rational.  A diagonal
    input that is already ordered yields S = I.
    """
    a = to_fraction_matrix(h)
    n = len(a)
    if any(a[i][j] != a[j][i] for i in range(n) for j in range(n)):
        raise ValueError("matrix is not symmetric")
    s = identity(n)  # columns of s are the new basis vectors

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in s:
            row[i], row[j] = row[j], row[i]

    def add_col(dst, src, f):
        # basis change e_dst += f * e_src, applied as a congruence
        for row in s:
            row[dst] += f * row[src]
        for row in a:
            row[dst] += f * row[src]
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]

    for k in range(n):
        if not a[k][k]:
            j = next((j for j in range(k + 1, n) if a[j][j]), None)
            if j is not None:
                swap(k, j)
            else:
                j = next((j for j in range(k + 1, n) if a[k][j]), None)
                if j is None:
                    continue
                add_col(k, j, Fraction(1))
        pv = a[k][k]
        for j in range(k + 1, n):
            if a[k][j]:
                add_col(j, k, -a[k][j] / pv)

    diag = [a[i][i] for i in range(n)]
    order = (
        [i for i in range(n) if diag[i] > 0]
        + [i for i in range(n) if diag[i] < 0]
        + [i for i in range(n) if diag[i] == 0]
    )
    s = [[row[i] for i in order] for row in s]
    return s, [diag[i] for i in order]


def sylvester_signature(h: Sequence[Sequence]) -> Signature:
    _, diag = congruence_diagonalize(h)
    return Signature(sum(1 for v in diag if v > 0), sum(1 for v in diag if v < 0))
