"""Integer Smith normal form with unimodular transforms.

Pure Python integers throughout; matrices here are relator exponent
matrices (a handful of rows and columns), and exact arithmetic matters
more than speed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

Matrix = list[list[int]]


@dataclass(frozen=True)
class SmithNormalForm:
    invariant_factors: tuple[int, ...]
    rank: int
    """Free rank of the cokernel ``Z^cols / rowspace``."""

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_with_transforms(M: Sequence[Sequence[int]], ncols: int | None = None):
    """Return ``(D, U, V)`` with ``U @ M @ V == D`` diagonal and divisibility-chained.

    ``ncols`` fixes the column count for a matrix with zero rows.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row_dst += k * row_src
        if k:
            A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, k):  # col_dst += k * col_src
        if k:
            for row in A:
                row[dst] += k * row[src]
            for row in V:
                row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (pivot is None or abs(A[i][j]) < abs(A[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                q = A[i][t] // p
                add_row(t, i, -q)
                if A[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = A[t][j] // p
                add_col(t, j, -q)
                if A[t][j]:
                    clean = False
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if t < m and t < n and A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return A, U, V


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None) -> SmithNormalForm:
    D, _, _ = smith_with_transforms(M, ncols)
    n = len(D[0]) if D else (ncols or 0)
    factors = tuple(D[i][i] for i in range(min(len(D), n)) if D[i][i] != 0)
    return SmithNormalForm(invariant_factors=factors, rank=n - len(factors))


def solve_integer_system(A: Sequence[Sequence[int]], b: Sequence[int], ncols: int | None = None):
    """Solve ``A z = b`` over the integers; return a solution list or ``None``."""
    D, U, V = smith_with_transforms(A, ncols)
    m = len(D)
    n = len(D[0]) if m else (ncols or 0)
    if len(b) != m:
        raise ValueError("right-hand side length does not match row count")
    ub = [sum(U[i][k] * b[k] for k in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % d:
                return None
            y[i] = ub[i] // d
    return [sum(V[j][k] * y[k] for k in range(n)) for j in range(n)]


class LatticeQuotient:
    """The abelian group ``Z^n / rowspace(R)`` with canonical element keys."""

    def __init__(self, relations: Sequence[Sequence[int]], n: int):
        self.n = n
        D, _, V = smith_with_transforms(relations, n)
        self._V = V
        self._diag = [D[i][i] if i < len(D) and i < n else 0 for i in range(n)]

    def key(self, vec: Sequence[int]) -> tuple[int, ...]:
        e = [sum(vec[k] * self._V[k][j] for k in range(self.n)) for j in range(self.n)]
        out = []
        for j, d in enumerate(self._diag):
            if d == 0:
                out.append(e[j])
            elif d > 1:
                out.append(e[j] % d)
        return tuple(out)

    def is_zero(self, vec: Sequence[int]) -> bool:
        return not any(self.key(vec))
