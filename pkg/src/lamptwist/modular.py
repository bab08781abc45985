"""Modular arithmetic utilities: factorization, CRT, linear solving over Z_n.

The linear solver diagonalizes the coefficient matrix over Z (Smith normal
form), which decouples the system into independent congruences d_i y_i = c_i
that are each decidable by a gcd condition.  That route is complete: unlike
echelon back-substitution over Z_n, it cannot reject a system that a better
choice of free variables would satisfy.  All steps are exact.
"""

from __future__ import annotations

from math import gcd


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; fine for desk-scale moduli."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def modinv(a: int, m: int) -> int | None:
    """Inverse of a mod m, or None when gcd(a, m) > 1."""
    try:
        return pow(a, -1, m)
    except ValueError:
        return None


def crt_pair(a1: int, m1: int, a2: int, m2: int) -> int:
    """Solve x = a1 (mod m1), x = a2 (mod m2) for coprime moduli."""
    if gcd(m1, m2) != 1:
        raise ValueError(f"moduli {m1}, {m2} are not coprime")
    inv = pow(m1 % m2, -1, m2)
    return (a1 + m1 * (((a2 - a1) * inv) % m2)) % (m1 * m2)


def crt(residues) -> tuple[int, int]:
    """Fold a sequence of (residue, modulus) pairs; returns (x, product)."""
    x, m = 0, 1
    for a, mm in residues:
        x = crt_pair(x, m, a % mm, mm)
        m *= mm
    return x, m


def solve_linear(a, b, modulus: int):
    """Particular solution of a x = b (mod modulus), or None.

    `a` is a list of rows, `b` the right-hand side.  The solution is
    verified against the original system before being returned.
    """
    if modulus < 2:
        raise ValueError(f"modulus must be at least 2, got {modulus}")
    from .matrix import mat_vec, smith_normal_form

    nrows = len(a)
    if nrows == 0:
        return []
    ncols = len(a[0])
    if ncols == 0:
        return [] if all(bb % modulus == 0 for bb in b) else None
    triple = smith_normal_form(a)
    c = mat_vec(triple.u, tuple(b))
    rank_bound = min(nrows, ncols)
    y = [0] * ncols
    for i in range(nrows):
        d = triple.d[i][i] if i < rank_bound else 0
        ci = c[i] % modulus
        g = gcd(d, modulus)
        if ci % g:
            return None
        if d:
            reduced = modulus // g
            if reduced > 1:
                inv = pow((d // g) % reduced, -1, reduced)
                y[i] = ((ci // g) * inv) % reduced
    x = [v % modulus for v in mat_vec(triple.v, tuple(y))]
    for row, bb in zip(a, b):
        if (sum(r * xx for r, xx in zip(row, x)) - bb) % modulus:
            raise AssertionError("modular solver produced an invalid solution")
    return x


def divisors(n: int) -> list[int]:
    """Sorted positive divisors."""
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)
