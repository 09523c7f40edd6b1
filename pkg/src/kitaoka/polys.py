"""Exact univariate polynomial helpers: Sturm-certified real root isolation and
certified sign evaluation over dyadic intervals.

Polynomials are coefficient lists, constant term first. Root isolation keeps
rational (in practice dyadic) endpoints so that every later refinement and sign
decision is exact integer arithmetic.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InternalCheckError, NotTotallyReal

Poly = list[Fraction]


def poly_degree(p) -> int:
    d = len(p) - 1
    while d >= 0 and p[d] == 0:
        d -= 1
    return d


def poly_eval(p, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_derivative(p) -> Poly:
    return [Fraction(k) * p[k] for k in range(1, len(p))] or [Fraction(0)]


def poly_neg(p) -> Poly:
    return [-c for c in p]


def poly_mod(a, b) -> Poly:
    """Remainder of a by b over the rationals; b must be nonzero."""
    db = poly_degree(b)
    if db < 0:
        raise ZeroDivisionError("polynomial modulus is zero")
    r = [Fraction(c) for c in a]
    lead = b[db]
    while poly_degree(r) >= db:
        dr = poly_degree(r)
        factor = r[dr] / lead
        shift = dr - db
        for i in range(db + 1):
            r[shift + i] -= factor * b[i]
        r[dr] = Fraction(0)
    return r[:db] if db > 0 else [Fraction(0)]


def poly_mul(a, b) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return out


def sturm_chain(p) -> list[Poly]:
    chain = [[Fraction(c) for c in p], poly_derivative(p)]
    while poly_degree(chain[-1]) > 0:
        rem = poly_mod(chain[-2], chain[-1])
        if poly_degree(rem) < 0:
            break  # repeated roots: chain ends at the gcd
        chain.append(poly_neg(rem))
    return chain


def _sign_variations(chain, x: Fraction) -> int:
    signs = []
    for q in chain:
        v = poly_eval(q, x)
        if v:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(chain, lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots in the half-open interval (lo, hi]."""
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def cauchy_bound(p) -> Fraction:
    d = poly_degree(p)
    lead = abs(p[d])
    return 1 + max(abs(c) for c in p[:d] or [Fraction(0)]) / lead


def isolate_real_roots(p, expected: int) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals for all real roots, ascending.

    Each interval is either a point (lo == hi, rational root) or carries a sign
    change of p at its endpoints so plain bisection refines it. Raises
    NotTotallyReal unless exactly ``expected`` distinct real roots exist.
    """
    chain = sturm_chain(p)
    bound = cauchy_bound(p)
    total = count_real_roots(chain, -bound, bound)
    if total != expected:
        raise NotTotallyReal(
            f"expected {expected} distinct real roots, Sturm counts {total}"
        )

    out: list[tuple[Fraction, Fraction]] = []

    def peel_point(lo: Fraction, hi: Fraction, root: Fraction, n: int) -> None:
        # `root` is an exact rational root in (lo, hi]; isolate it as a point
        # and recurse on both sides, shrinking until no other root interferes.
        out.append((root, root))
        delta = (hi - lo) / 8
        a, b = root - delta, min(root + delta, hi)
        while count_real_roots(chain, a, b) != 1:
            delta /= 2
            a, b = root - delta, min(root + delta, hi)
        split(lo, a, count_real_roots(chain, lo, a))
        if b < hi:
            split(b, hi, count_real_roots(chain, b, hi))

    def split(lo: Fraction, hi: Fraction, n: int) -> None:
        if n == 0:
            return
        if poly_eval(p, hi) == 0:
            peel_point(lo, hi, hi, n)
            return
        if n == 1 and poly_eval(p, lo) * poly_eval(p, hi) < 0:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        if poly_eval(p, mid) == 0:
            peel_point(lo, hi, mid, n)
            return
        left = count_real_roots(chain, lo, mid)
        split(lo, mid, left)
        split(mid, hi, n - left)

    split(-bound, bound, total)
    out.sort(key=lambda iv: iv[0])
    if len(out) != expected:
        raise InternalCheckError("root isolation lost a root")
    return out


def refine_root(p, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval (sign change at endpoints) down to ``width``."""
    if lo == hi:
        return lo, hi
    flo = poly_eval(p, lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        fmid = poly_eval(p, mid)
        if fmid == 0:
            return mid, mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return lo, hi


def interval_eval_int(coeffs: list[int], lo_num: int, hi_num: int, den: int) -> tuple[int, int, int]:
    """Enclosure of an integer-coefficient polynomial over [lo_num/den, hi_num/den].

    Returns integers (a, b, scale) with p(x) in [a/scale, b/scale] for every x
    in the interval. Pure integer interval Horner.
    """
    n = len(coeffs) - 1
    while n > 0 and coeffs[n] == 0:
        n -= 1
    a = b = coeffs[n]
    scale = 1
    for k in range(n - 1, -1, -1):
        p1 = a * lo_num
        p2 = a * hi_num
        p3 = b * lo_num
        p4 = b * hi_num
        scale *= den
        c = coeffs[k] * scale
        a = min(p1, p2, p3, p4) + c
        b = max(p1, p2, p3, p4) + c
    return a, b, scale
