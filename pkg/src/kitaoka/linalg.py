"""Exact linear algebra over the integers and the rationals.

Everything here is deterministic and division-free where it matters: Bareiss
for integer determinants, Hermite reduction with unimodular transforms for
integer solving and Z-module bases.
"""

from __future__ import annotations

from fractions import Fraction


def int_det(m: list[list[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def frac_inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    """Inverse of a square rational matrix (Gauss-Jordan); raises on singular."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]


def _row_sub(m: list[list[int]], i: int, j: int, q: int) -> None:
    if q:
        mi, mj = m[i], m[j]
        for k in range(len(mi)):
            mi[k] -= q * mj[k]


def hnf_rows(mat: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row Hermite form: returns (H, U) with U unimodular and U*mat = H.

    H is in row echelon form with positive pivots and reduced entries above
    each pivot; zero rows sink to the bottom.
    """
    m = len(mat)
    n = len(mat[0]) if m else 0
    h = [row[:] for row in mat]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, m) if h[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(h[i][c]))
            for i in nz:
                if i != i0:
                    q = h[i][c] // h[i0][c]
                    _row_sub(h, i, i0, q)
                    _row_sub(u, i, i0, q)
            if [i for i in range(r, m) if h[i][c]] == [i0]:
                break
        nz = [i for i in range(r, m) if h[i][c]]
        if not nz:
            continue
        piv = nz[0]
        h[r], h[piv] = h[piv], h[r]
        u[r], u[piv] = u[piv], u[r]
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = h[i][c] // h[r][c]
            _row_sub(h, i, r, q)
            _row_sub(u, i, r, q)
        r += 1
    return h, u


def solve_int(a: list[list[int]], b: list[int]) -> list[int] | None:
    """One integer solution x of a @ x = b, or None if none exists."""
    m = len(a)
    n = len(a[0]) if m else 0
    # work on columns: row-reduce the transpose, so x = U^T y with H^T y = b
    h, u = hnf_rows([[a[i][j] for i in range(m)] for j in range(n)])
    # h is n x m; columns of h^T are rows of h.  Solve sum_j y_j * h[j] = b
    # greedily: h rows are in echelon form by leading index.
    y = [0] * n
    b = b[:]
    for j in range(n):
        lead = next((k for k in range(m) if h[j][k]), None)
        if lead is None:
            continue
        if b[lead] % h[j][lead]:
            return None
        q = b[lead] // h[j][lead]
        y[j] = q
        for k in range(m):
            b[k] -= q * h[j][k]
    if any(b):
        return None
    return [sum(u[j][i] * y[j] for j in range(n)) for i in range(n)]


def zmodule_basis(gens: list[list[int]]) -> list[list[int]]:
    """Basis (echelon, canonical) of the Z-module spanned by integer vectors."""
    if not gens:
        return []
    h, _ = hnf_rows(gens)
    return [row for row in h if any(row)]


def zmodule_contains(basis: list[list[int]], v: list[int]) -> bool:
    """Membership of v in the Z-span of an echelon basis (from zmodule_basis)."""
    v = v[:]
    for row in basis:
        lead = next((k for k, x in enumerate(row) if x), None)
        if lead is None:
            continue
        if v[lead]:
            if v[lead] % row[lead]:
                return False
            q = v[lead] // row[lead]
            for k in range(len(v)):
                v[k] -= q * row[k]
    return not any(v)
