"""Periodic continued fractions of real quadratic integers.

Drives two things: the fundamental unit of a real quadratic field (minimal
Pell-type solution, norm verified exactly) and the semiconvergent candidate
family feeding the indecomposability cross-checks.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .errors import InternalCheckError, NotQuadratic
from .field import Elem, Field

_MAX_QUOTIENTS = 400


def _cf_params(f: Field) -> tuple[int, int, int]:
    """(p, N, isqrt(N)) for the generator t = (-p + sqrt(N))/2."""
    if f.degree != 2:
        raise NotQuadratic(f"{f.id} has degree {f.degree}")
    p = f.spec.poly[1]
    q = f.spec.poly[0]
    n = p * p - 4 * q
    s = isqrt(n)
    if s * s == n:
        raise NotQuadratic("defining polynomial has rational roots")
    return p, n, s


def conjugate_quadratic(f: Field, e: Elem) -> Elem:
    """The image of e under the nontrivial automorphism (t -> -p - t)."""
    c0, c1 = f.power_coords(e)
    p = f.spec.poly[1]
    return f._power_vector_to_elem([c0 - c1 * p, -c1])  # noqa: SLF001 (same package)


def partial_quotients(f: Field, count: int) -> list[int]:
    """First ``count`` partial quotients of the generator's continued fraction."""
    p, n, s = _cf_params(f)
    big_p, big_q = -p, 2
    out = []
    for _ in range(count):
        a = (big_p + s) // big_q
        out.append(a)
        big_p = a * big_q - big_p
        big_q = (n - big_p * big_p) // big_q
    return out


def _pairs(f: Field):
    """Yields (a_{i+1}, (h_i, k_i), (h_{i-1}, k_{i-1})) starting at i = -1
    with (h_{-1}, k_{-1}) = (1, 0) and (h_{-2}, k_{-2}) = (0, 1)."""
    p, n, s = _cf_params(f)
    big_p, big_q = -p, 2
    h2, h1 = 0, 1
    k2, k1 = 1, 0
    for _ in range(_MAX_QUOTIENTS):
        a = (big_p + s) // big_q
        yield a, (h1, k1), (h2, k2)
        big_p = a * big_q - big_p
        big_q = (n - big_p * big_p) // big_q
        h2, h1 = h1, a * h1 + h2
        k2, k1 = k1, a * k1 + k2


def _pair_elem(f: Field, h: int, k: int) -> Elem:
    """h - k*conj(t) as a field element; conj(t) = -p - t."""
    p = f.spec.poly[1]
    return f.from_int(h + k * p) + k * f.gen


def _pair_trace(f: Field, h: int, k: int) -> int:
    return 2 * h + f.spec.poly[1] * k


def fundamental_unit_quadratic(f: Field) -> Elem:
    """The fundamental unit > 1 of a real quadratic field, from the periodic
    continued fraction of the generator; norm +-1 verified exactly."""
    first = True
    for _a, (h1, k1), _prev in _pairs(f):
        if first:
            first = False  # (1, 0) is the trivial element 1
            continue
        alpha = _pair_elem(f, h1, k1)
        if alpha.norm() in (1, -1):
            if f.sign_at(alpha - f.one, f.degree - 1) <= 0:
                raise InternalCheckError("continued fraction produced a unit <= 1")
            return alpha
    raise InternalCheckError("no unit among the first convergents")


def semiconvergent_elements(f: Field, trace_bound: int) -> list[Elem]:
    """Candidates h - k*conj(t) over all semiconvergents (h, k), plus their
    negatives and conjugates, with trace in (0, trace_bound]. Unverified: the
    caller filters for total positivity and exact indecomposability."""
    seen: set[tuple[int, ...]] = set()
    out: list[Elem] = []

    def push(h: int, k: int) -> None:
        e = _pair_elem(f, h, k)
        for cand in (e, -e):
            for v in (cand, conjugate_quadratic(f, cand)):
                if v.coords not in seen:
                    seen.add(v.coords)
                    if 0 < v.trace() <= trace_bound:
                        out.append(v)

    for a_next, (h1, k1), (h2, k2) in _pairs(f):
        for r in range(a_next + 1):
            push(h2 + r * h1, k2 + r * k1)
        push(h1, k1)
        done_lo = abs(_pair_trace(f, h1, k1)) > trace_bound
        done_prev = abs(_pair_trace(f, h2, k2)) > trace_bound
        if done_lo and done_prev and k1 > 0:
            break
    return out


def house_upper_bound(f: Field, e: Elem) -> Fraction:
    """A certified rational upper bound for the house of e."""
    _lo, hi = f.house(e, Fraction(1, 16))
    return hi
