"""Exact integer matrix helpers and the Smith normal form.

Matrices are tuples of row tuples of Python ints; everything is
arbitrary-precision and fraction-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

IntMatrix = tuple[tuple[int, ...], ...]


def as_matrix(rows: Iterable[Sequence[int]]) -> IntMatrix:
    mat = tuple(tuple(int(x) for x in row) for row in rows)
    if not mat or any(len(r) != len(mat[0]) for r in mat):
        raise ValueError("matrix rows must be nonempty and of equal length")
    return mat


def identity(k: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))


def transpose(m: IntMatrix) -> IntMatrix:
    return tuple(zip(*m))


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if len(a[0]) != len(b):
        raise ValueError("inner dimensions differ")
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(m: IntMatrix, z: Sequence[int]) -> tuple[int, ...]:
    if len(m[0]) != len(z):
        raise ValueError("dimension mismatch")
    return tuple(sum(r * c for r, c in zip(row, z)) for row in m)


def mat_sub(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_neg(a: IntMatrix) -> IntMatrix:
    return tuple(tuple(-x for x in row) for row in a)


def mat_pow(m: IntMatrix, e: int) -> IntMatrix:
    if e < 0:
        raise ValueError("negative power")
    out = identity(len(m))
    base = m
    while e:
        if e & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        e >>= 1
    return out


def det(m: IntMatrix) -> int:
    """Fraction-free Gaussian elimination (Bareiss); exact for any size."""
    k = len(m)
    if any(len(r) != k for r in m):
        raise ValueError("determinant of a non-square matrix")
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for i in range(k - 1):
        if a[i][i] == 0:
            for r in range(i + 1, k):
                if a[r][i]:
                    a[i], a[r] = a[r], a[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[k - 1][k - 1]


def is_unimodular(m: IntMatrix) -> bool:
    return len(m) == len(m[0]) and det(m) in (1, -1)


def inverse_unimodular(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a matrix with determinant +-1 (adjugate route)."""
    d = det(m)
    if d not in (1, -1):
        raise ValueError(f"matrix determinant is {d}, not a unit")
    k = len(m)
    if k == 1:
        return ((d,),)
    inv = []
    for i in range(k):
        row = []
        for j in range(k):
            minor = tuple(
                tuple(m[r][c] for c in range(k) if c != i) for r in range(k) if r != j
            )
            cof = det(minor)
            if (i + j) & 1:
                cof = -cof
            row.append(cof * d)
        inv.append(tuple(row))
    return tuple(inv)


def matrix_order(m: IntMatrix, cap: int = 128) -> int | None:
    """Least t >= 1 with m^t = identity, or None if no such t up to cap."""
    ident = identity(len(m))
    p = m
    for t in range(1, cap + 1):
        if p == ident:
            return t
        p = mat_mul(p, m)
    return None


def random_unimodular(rng, k: int, steps: int = 12, coeff_bound: int = 3) -> IntMatrix:
    """Product of random elementary row operations; always determinant +-1."""
    a = [list(row) for row in identity(k)]
    for _ in range(steps):
        kind = rng.randrange(3)
        i = rng.randrange(k)
        j = rng.randrange(k)
        if kind == 0 and i != j:
            q = rng.randint(-coeff_bound, coeff_bound)
            for c in range(k):
                a[i][c] += q * a[j][c]
        elif kind == 1 and i != j:
            a[i], a[j] = a[j], a[i]
        elif kind == 2:
            for c in range(k):
                a[i][c] = -a[i][c]
    return tuple(tuple(row) for row in a)


@dataclass(frozen=True)
class SnfTriple:
    """Factorization U @ B @ V = D with U, V unimodular and D diagonal."""

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    def diagonal(self) -> list[int]:
        return [self.d[i][i] for i in range(min(len(self.d), len(self.d[0])))]


def smith_normal_form(b: IntMatrix) -> SnfTriple:
    """Smith normal form over Z.

    Returns SnfTriple(U, D, V) with U b V = D, |det U| = |det V| = 1, the
    diagonal nonnegative and each entry dividing the next.  Rectangular
    input is allowed.  Pivots are chosen by minimal absolute value.
    """
    b = as_matrix(b)
    m, n = len(b), len(b[0])
    a = [list(row) for row in b]
    u = [list(row) for row in identity(m)]
    v = [list(row) for row in identity(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def add_row(i, j, q):
        # row_i += q * row_j
        for c in range(n):
            a[i][c] += q * a[j][c]
        for c in range(m):
            u[i][c] += q * u[j][c]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_col(i, j, q):
        # col_i += q * col_j
        for row in a:
            row[i] += q * row[j]
        for row in v:
            row[i] += q * row[j]

    def find_pivot(t):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        return best

    for t in range(min(m, n)):
        while True:
            piv = find_pivot(t)
            if piv is None:
                break
            _, pi, pj = piv
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            # clear below and to the right of the pivot
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        dirty = True
            if dirty:
                continue
            # divisibility: the pivot must divide the remaining block
            stray = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % a[t][t]:
                        stray = i
                        break
                if stray is not None:
                    break
            if stray is None:
                break
            add_row(t, stray, 1)
        if t < m and t < n and a[t][t] < 0:
            negate_row(t)

    triple = SnfTriple(
        tuple(tuple(row) for row in u),
        tuple(tuple(row) for row in a),
        tuple(tuple(row) for row in v),
    )
    if mat_mul(mat_mul(triple.u, b), triple.v) != triple.d:
        raise AssertionError("Smith normal form accumulator mismatch")
    return triple
