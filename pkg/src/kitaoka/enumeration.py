"""Fincke-Pohst lattice-point enumeration, exact by construction.

The quadratic form is decomposed once as Q(x) = sum_i q_i (x_i + sum_{j>i}
u_ij x_j)^2 with exact rational q_i, u_ij, then rescaled to integers: with M a
common denominator of the u's and L one of the q's, the pruning inequality
becomes (q_i L) * (M x_i + c_i)^2 <= rem, all quantities integers. Pruning is
therefore exact -- no lattice point below the bound is ever missed, so an
empty result is a proof of non-representation at that level.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .errors import BudgetExceeded, NotPositiveDefinite

DEFAULT_NODE_LIMIT = 10_000_000


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a // gcd(a, b) * b


class QuadLattice:
    """A positive definite integer Gram matrix with cached enumeration data."""

    def __init__(self, gram: list[list[int]]):
        n = len(gram)
        for i in range(n):
            if len(gram[i]) != n:
                raise ValueError("gram matrix is not square")
            for j in range(n):
                if gram[i][j] != gram[j][i]:
                    raise ValueError("gram matrix is not symmetric")
        self.n = n
        self.gram = [row[:] for row in gram]
        self._decompose()

    def _decompose(self) -> None:
        n = self.n
        a = [[Fraction(x) for x in row] for row in self.gram]
        q: list[Fraction] = [Fraction(0)] * n
        u: list[list[Fraction]] = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            q[i] = a[i][i]
            if q[i] <= 0:
                raise NotPositiveDefinite(f"pivot {i} is {q[i]}")
            for j in range(i + 1, n):
                u[i][j] = a[i][j] / q[i]
            for j in range(i + 1, n):
                for k in range(j, n):
                    a[j][k] -= q[i] * u[i][j] * u[i][k]
                    a[k][j] = a[j][k]
        big_m = 1
        for i in range(n):
            for j in range(i + 1, n):
                big_m = _lcm(big_m, u[i][j].denominator)
        big_l = 1
        for i in range(n):
            big_l = _lcm(big_l, q[i].denominator)
        self._qL = [int(q[i] * big_l) for i in range(n)]
        self._uM = [[int(u[i][j] * big_m) for j in range(n)] for i in range(n)]
        self._M = big_m
        self._scale = big_l * big_m * big_m

    def value(self, x: tuple[int, ...] | list[int]) -> int:
        g = self.gram
        n = self.n
        total = 0
        for i in range(n):
            xi = x[i]
            if xi:
                row = g[i]
                total += xi * sum(row[j] * x[j] for j in range(n))
        return total

    def vectors_at(self, level: int, node_limit: int = DEFAULT_NODE_LIMIT) -> list[tuple[int, ...]]:
        """All integer vectors x with x^T G x == level, exact and exhaustive."""
        if level < 0:
            return []
        if level == 0:
            return [(0,) * self.n]
        return self._search(level, exact=True, node_limit=node_limit)

    def vectors_upto(self, bound: int, node_limit: int = DEFAULT_NODE_LIMIT) -> list[tuple[int, ...]]:
        """All integer vectors x with x^T G x <= bound (includes the zero vector)."""
        if bound < 0:
            return []
        return self._search(bound, exact=False, node_limit=node_limit)

    def _search(self, level: int, exact: bool, node_limit: int) -> list[tuple[int, ...]]:
        n = self.n
        qL = self._qL
        uM = self._uM
        big_m = self._M
        sols: list[tuple[int, ...]] = []
        x = [0] * n
        nodes = [0]

        def rec(i: int, rem: int) -> None:
            nodes[0] += 1
            if nodes[0] > node_limit:
                raise BudgetExceeded(f"enumeration exceeded {node_limit} nodes")
            row = uM[i]
            c = 0
            for j in range(i + 1, n):
                xj = x[j]
                if xj:
                    c += row[j] * xj
            qi = qL[i]
            if i == 0 and exact:
                # solve q0*(M*x0 + c)^2 == rem directly
                if rem % qi:
                    return
                s = rem // qi
                w = isqrt(s)
                if w * w != s:
                    return
                for ww in ((w, -w) if w else (w,)):
                    num = ww - c
                    if num % big_m == 0:
                        x[0] = num // big_m
                        sols.append(tuple(x))
                return
            wmax = isqrt(rem // qi)
            lo = -((wmax + c) // big_m)
            hi = (wmax - c) // big_m
            if i == 0:
                for xi in range(lo, hi + 1):
                    x[0] = xi
                    sols.append(tuple(x))
                nodes[0] += max(0, hi - lo + 1)
                return
            for xi in range(lo, hi + 1):
                w = big_m * xi + c
                x[i] = xi
                rec(i - 1, rem - qi * w * w)
            x[i] = 0

        rec(n - 1, level * self._scale)
        return sols
