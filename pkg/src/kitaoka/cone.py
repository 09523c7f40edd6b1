"""The totally positive cone of a field: bounded enumeration by trace, exact
indecomposability decisions, decomposition multisets, and small-norm scans.

Everything here carries proof force: enumeration below a trace bound is
complete (totally positive alpha with Tr(alpha) <= T has every embedding in
(0, T), hence trace-form value Tr(alpha^2) <= T^2), so absence of a
decomposition witness in the search region is a certificate, not a heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

from . import surd
from .enumeration import DEFAULT_NODE_LIMIT
from .errors import BudgetExceeded, NotTotallyPositive, UnitsUnavailable
from .field import Elem, Field

INDECOMPOSABLE = "Indecomposable"
DECOMPOSED = "Decomposed"


@dataclass(frozen=True)
class IndecompVerdict:
    status: str
    witness: tuple[Elem, Elem] | None = None

    @property
    def is_indecomposable(self) -> bool:
        return self.status == INDECOMPOSABLE


@dataclass(frozen=True)
class Decomposition:
    """A multiset of totally positive parts, stored in nonincreasing canonical
    order (descending trace, then descending coordinates)."""

    parts: tuple[Elem, ...]

    def __len__(self) -> int:
        return len(self.parts)


@dataclass(frozen=True)
class SmallNormEntry:
    elem: Elem
    norm: int
    power_of_two: bool


@dataclass(frozen=True)
class SmallNormScan:
    entries: tuple[SmallNormEntry, ...]
    exhaustive: bool
    trace_bound: int  # effective bound actually scanned
    norm_bound: int

    def non_powers_of_two(self) -> list[SmallNormEntry]:
        return [e for e in self.entries if not e.power_of_two]


def enumerate_tp_by_trace(f: Field, trace_bound: int, node_limit: int = DEFAULT_NODE_LIMIT) -> list[Elem]:
    """Exactly the totally positive integers with trace <= trace_bound,
    deduplicated, in canonical order (ascending trace, then lex coordinates)."""
    if trace_bound < 1:
        return []
    key = ("tp_enum", trace_bound)
    cached = f.cache.get(key)
    if cached is not None:
        return cached
    out: list[Elem] = []
    for vec in f.trace_qlattice.vectors_upto(trace_bound * trace_bound, node_limit):
        e = Elem(f, vec)
        if e.is_zero:
            continue
        tr = e.trace()
        if not 1 <= tr <= trace_bound:
            continue
        if e.is_totally_positive():
            out.append(e)
    out.sort(key=Elem.key)
    f.cache[key] = out
    return out


def is_indecomposable(f: Field, alpha: Elem, node_limit: int = DEFAULT_NODE_LIMIT) -> IndecompVerdict:
    """Exact decision: Decomposed comes with a witness pair, Indecomposable is
    a proof by exhaustion over all totally positive delta with smaller trace."""
    f.check_same(alpha)
    if not alpha.is_totally_positive():
        raise NotTotallyPositive(f"{alpha} is not totally positive")
    for delta in enumerate_tp_by_trace(f, alpha.trace() - 1, node_limit):
        rest = alpha - delta
        if rest.is_totally_positive():
            assert (delta + rest) == alpha
            return IndecompVerdict(DECOMPOSED, (delta, rest))
    return IndecompVerdict(INDECOMPOSABLE)


def indecomposable_by_norm(f: Field, alpha: Elem) -> bool:
    """Sufficient norm test: a totally positive integer of norm below 2^d is
    indecomposable. (One direction only.)"""
    f.check_same(alpha)
    if not alpha.is_totally_positive():
        raise NotTotallyPositive(f"{alpha} is not totally positive")
    return alpha.norm() < 2 ** f.degree


def iter_indecomposables(f: Field, trace_bound: int, node_limit: int = DEFAULT_NODE_LIMIT):
    """Verified indecomposables in canonical order, lazily (supports early exit)."""
    for alpha in enumerate_tp_by_trace(f, trace_bound, node_limit):
        if is_indecomposable(f, alpha, node_limit).is_indecomposable:
            yield alpha


def decompositions(
    f: Field, alpha: Elem, max_parts: int, node_limit: int = DEFAULT_NODE_LIMIT
) -> list[Decomposition]:
    """All multisets of at most max_parts totally positive integers summing to
    alpha, deduplicated by nonincreasing part order."""
    f.check_same(alpha)
    if not alpha.is_totally_positive():
        raise NotTotallyPositive(f"{alpha} is not totally positive")
    if max_parts < 1:
        raise ValueError("max_parts must be >= 1")
    candidates = [
        e for e in enumerate_tp_by_trace(f, alpha.trace(), node_limit)
        if (alpha - e).is_totally_nonneg()
    ]
    results: list[Decomposition] = []
    parts: list[Elem] = []
    nodes = [0]

    def rec(remaining: Elem, max_idx: int, budget: int) -> None:
        nodes[0] += 1
        if nodes[0] > node_limit:
            raise BudgetExceeded("decomposition search exceeded the node limit")
        if remaining.is_zero:
            results.append(Decomposition(tuple(parts)))
            return
        if budget == 0:
            return
        rem_trace = remaining.trace()
        for idx in range(max_idx, -1, -1):
            p = candidates[idx]
            if p.trace() > rem_trace:
                continue
            rest = remaining - p
            if rest.is_totally_nonneg():
                parts.append(p)
                rec(rest, idx, budget - 1)
                parts.pop()

    rec(alpha, len(candidates) - 1, max_parts)
    results.sort(key=lambda dec: (len(dec.parts), [p.key() for p in dec.parts]))
    return results


def small_norm_scan(
    f: Field,
    trace_bound: int,
    exhaustive: bool | str = "auto",
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> SmallNormScan:
    """All scanned totally positive integers of norm below 2^d, each flagged
    power-of-two or not.

    In quadratic exhaustive mode the scan covers a full set of representatives
    modulo totally positive units (ratio of embeddings normalized into
    [1, sigma(g)^2) for the totally positive fundamental generator g), so an
    empty non-power-of-two list certifies that none exists in the whole cone.
    """
    if exhaustive == "auto":
        exhaustive = f.degree == 2
    effective = trace_bound
    if exhaustive:
        if f.degree != 2:
            raise UnitsUnavailable("exhaustive mode needs the quadratic unit normalization")
        g = surd.fundamental_unit_quadratic(f)
        if not g.is_totally_positive():
            g = g * g
        # a normalized representative has sigma_2 < 2^{d/2} = 2 and
        # sigma_1 < 2 * sigma_1(g), so trace < 2*house(g) + 2
        needed = ceil(2 * surd.house_upper_bound(f, g) + 2)
        effective = max(trace_bound, needed)
    norm_bound = 2 ** f.degree
    entries = []
    for e in enumerate_tp_by_trace(f, effective, node_limit):
        n = e.norm()
        if n < norm_bound:
            entries.append(SmallNormEntry(e, n, n & (n - 1) == 0))
    return SmallNormScan(tuple(entries), bool(exhaustive), effective, norm_bound)


def cf_indecomposable_candidates(
    f: Field, trace_bound: int = 20, node_limit: int = DEFAULT_NODE_LIMIT
) -> list[Elem]:
    """Indecomposable candidates from semiconvergents of the generator's
    continued fraction, each verified by the exact checker."""
    out = [
    ]
    for cand in surd.semiconvergent_elements(f, trace_bound):
        if cand.is_totally_positive() and is_indecomposable(f, cand, node_limit).is_indecomposable:
            out.append(cand)
    out.sort(key=Elem.key)
    return out
