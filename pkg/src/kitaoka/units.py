"""Unit groups, signatures, and the square-class machinery.

The signature homomorphism sends a nonzero element to its vector of embedding
signs; the image of the unit group is an F2 row space whose index 2^k equals
the number of totally positive unit classes modulo squares. k = 1 activates
the M+/M- dichotomy and the norm descent used by the obstruction rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import surd
from .enumeration import DEFAULT_NODE_LIMIT
from .errors import (
    CatalogIncomplete,
    HypothesisFailed,
    InternalCheckError,
    IterationLimit,
    NotTotallyPositive,
    RequiresKOne,
    ZeroElement,
)
from .field import Elem, Field, sqrt_exact

M_PLUS = "M_plus"
M_MINUS = "M_minus"


@dataclass(frozen=True)
class Signature:
    signs: tuple[int, ...]

    def __mul__(self, other: "Signature") -> "Signature":
        return Signature(tuple(a * b for a, b in zip(self.signs, other.signs)))

    @property
    def mask(self) -> int:
        m = 0
        for i, s in enumerate(self.signs):
            if s < 0:
                m |= 1 << i
        return m

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)


@dataclass(frozen=True)
class UnitGroup:
    field: Field
    generators: tuple[Elem, ...]
    includes_torsion: bool  # -1, always present
    source: str  # "computed-cf" | "catalog"


@dataclass(frozen=True)
class SignatureSubgroup:
    """Row space of the unit signatures inside {+-1}^d, encoded as F2 bitmasks."""

    degree: int
    basis_masks: tuple[int, ...]
    k: int

    def contains_mask(self, mask: int) -> bool:
        for b in self.basis_masks:
            low = b & -b
            if mask & low:
                mask ^= b
        return mask == 0

    def contains(self, sig: Signature) -> bool:
        return self.contains_mask(sig.mask)


@dataclass(frozen=True)
class SquareClassData:
    k: int
    epsilon: Elem | None


def build_unit_group(f: Field) -> UnitGroup:
    """Unit generators: computed by continued fractions in degree 2 (and
    cross-checked against the catalog), taken from the catalog otherwise."""
    if f.degree == 1:
        return UnitGroup(f, (), True, "computed-cf")
    if f.degree == 2:
        eps = surd.fundamental_unit_quadratic(f)
        for s in f.spec.unit_generators:
            g = f.parse(s)
            inv = f.unit_inverse(eps)
            if g not in (eps, -eps, inv, -inv):
                raise CatalogIncomplete(
                    f"catalog unit {s} of {f.id} is not the fundamental unit (computed {eps})"
                )
        return UnitGroup(f, (eps,), True, "computed-cf")
    gens = []
    for s in f.spec.unit_generators:
        g = f.parse(s)
        if g.norm() not in (1, -1):
            raise CatalogIncomplete(f"catalog unit {s} of {f.id} has norm {g.norm()}")
        gens.append(g)
    if len(gens) != f.degree - 1:
        raise CatalogIncomplete(
            f"{f.id}: expected {f.degree - 1} unit generators, catalog has {len(gens)}"
        )
    return UnitGroup(f, tuple(gens), True, "catalog")


def signature(f: Field, a: Elem) -> Signature:
    f.check_same(a)
    if a.is_zero:
        raise ZeroElement("the zero element has no signature")
    return Signature(a.signs())


def _f2_echelon(masks: list[int]) -> list[int]:
    basis: list[int] = []
    for m in masks:
        for b in basis:
            if m & (b & -b):
                m ^= b
        if m:
            basis.append(m)
            basis.sort(key=lambda x: x & -x)
    return basis


def _generator_masks(f: Field, units: UnitGroup) -> list[int]:
    minus_one = (1 << f.degree) - 1  # signature of -1 is all-minus
    return [minus_one] + [signature(f, g).mask for g in units.generators]


def signature_subgroup(f: Field, units: UnitGroup) -> SignatureSubgroup:
    basis = _f2_echelon(_generator_masks(f, units))
    return SignatureSubgroup(f.degree, tuple(basis), f.degree - len(basis))


def _f2_solve(masks: list[int], target: int) -> int | None:
    """Subset (bitmask over generator indices) whose XOR is target, or None."""
    rows: list[tuple[int, int]] = []  # (mask, chosen-subset tag)
    for j, m in enumerate(masks):
        t = 1 << j
        for bm, bt in rows:
            if m & (bm & -bm):
                m ^= bm
                t ^= bt
        if m:
            rows.append((m, t))
            rows.sort(key=lambda x: x[0] & -x[0])
    tag = 0
    for bm, bt in rows:
        if target & (bm & -bm):
            target ^= bm
            tag ^= bt
    return tag if target == 0 else None


def _subset_product(f: Field, units: UnitGroup, subset: int) -> Elem:
    out = f.one
    if subset & 1:
        out = -out
    for j, g in enumerate(units.generators):
        if subset & (1 << (j + 1)):
            out = out * g
    return out


def tp_units_mod_squares(
    f: Field, units: UnitGroup, node_limit: int = DEFAULT_NODE_LIMIT
) -> SquareClassData:
    """k with |U+ / U^2| = 2^k, plus a certified nonsquare totally positive
    representative when k >= 1."""
    sub = signature_subgroup(f, units)
    k = sub.k
    if k == 0:
        return SquareClassData(0, None)
    masks = _generator_masks(f, units)
    # kernel vector: a nonempty subset of {-1, g_1, ...} with all-plus product.
    # Gaussian elimination over F2 with subset tags; pick the canonical first.
    epsilon = None
    for subset in range(1, 1 << len(masks)):
        x = 0
        for j in range(len(masks)):
            if subset & (1 << j):
                x ^= masks[j]
        if x == 0:
            epsilon = _subset_product(f, units, subset)
            break
    if epsilon is None:
        raise CatalogIncomplete(f"{f.id}: no totally positive unit class found despite k={k}")
    if not epsilon.is_totally_positive():
        raise InternalCheckError("all-plus signature product is not totally positive")
    if sqrt_exact(f, epsilon) is not None:
        raise CatalogIncomplete(
            f"{f.id}: candidate nonsquare unit {epsilon} is a square; generators incomplete"
        )
    return SquareClassData(k, epsilon)


def classify_M(f: Field, data: SquareClassData, units: UnitGroup, beta: Elem) -> str:
    """M+ iff the signature of beta lies in the unit signature subgroup (k=1)."""
    if data.k != 1:
        raise RequiresKOne(f"M classification is defined only for k=1, got k={data.k}")
    f.check_same(beta)
    if beta.is_zero:
        raise ZeroElement("cannot classify 0")
    sub = signature_subgroup(f, units)
    return M_PLUS if sub.contains(signature(f, beta)) else M_MINUS


def eta_for(f: Field, units: UnitGroup, alpha: Elem) -> Elem | None:
    """A unit eta with eta*alpha totally positive, when the signature of alpha
    is a unit signature; None otherwise."""
    f.check_same(alpha)
    if alpha.is_zero:
        raise ZeroElement("eta is undefined for 0")
    masks = _generator_masks(f, units)
    subset = _f2_solve(masks, signature(f, alpha).mask)
    if subset is None:
        return None
    eta = _subset_product(f, units, subset)
    if not (eta * alpha).is_totally_positive():
        raise InternalCheckError("solved eta does not positivize alpha")
    return eta


@dataclass(frozen=True)
class DescentStep:
    alpha: Elem
    t_value: Elem
    m_class: str
    eta: Elem | None


@dataclass(frozen=True)
class DescentTrace:
    steps: tuple[DescentStep, ...]
    beta: Elem
    j: int

    @property
    def iterations(self) -> int:
        return len(self.steps)


def descent_step(
    f: Field, data: SquareClassData, alpha: Elem, node_limit: int = DEFAULT_NODE_LIMIT
) -> Elem:
    """T(alpha): the canonical square root of alpha or eps*alpha.

    HypothesisFailed when neither is a square -- itself a criterion signal (the
    field then violates the indecomposable-square condition at alpha).
    """
    if data.k != 1:
        raise RequiresKOne("the descent map needs exactly one nonsquare unit class")
    f.check_same(alpha)
    if not alpha.is_totally_positive():
        raise NotTotallyPositive(f"{alpha} is not totally positive")
    root = sqrt_exact(f, alpha)
    if root is None:
        root = sqrt_exact(f, data.epsilon * alpha)
    if root is None:
        raise HypothesisFailed(
            f"neither {alpha} nor eps*({alpha}) is a square in the ring of integers"
        )
    if root.norm() ** 2 != abs(alpha.norm()):
        raise InternalCheckError("descent root norm mismatch")
    return root


def descent_run(
    f: Field,
    data: SquareClassData,
    units: UnitGroup,
    max_iter: int = 64,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> DescentTrace:
    """Iterate T from 2 until the image lands in M-, recording every step.

    The terminal beta satisfies |N(beta)| = 2^j <= 2^(d/2); norms along the
    chain decrease strictly (asserted)."""
    alpha = f.from_int(2)
    steps: list[DescentStep] = []
    prev_norm = abs(alpha.norm())
    for _ in range(max_iter):
        tval = descent_step(f, data, alpha, node_limit)
        cls = classify_M(f, data, units, tval)
        n = abs(tval.norm())
        if cls == M_MINUS:
            steps.append(DescentStep(alpha, tval, cls, None))
            j = n.bit_length() - 1
            if (1 << j) != n:
                raise InternalCheckError(f"terminal descent norm {n} is not a power of 2")
            if 2 * j > f.degree:
                raise InternalCheckError(f"terminal descent norm 2^{j} exceeds 2^(d/2)")
            return DescentTrace(tuple(steps), tval, j)
        eta = eta_for(f, units, tval)
        if eta is None:
            raise InternalCheckError("M+ element has no positivizing unit")
        steps.append(DescentStep(alpha, tval, cls, eta))
        alpha = eta * tval
        if n >= prev_norm:
            raise IterationLimit("descent norms stopped decreasing (unit cycle)")
        prev_norm = n
    raise IterationLimit(f"descent did not terminate within {max_iter} iterations")


def bounded_units(f: Field, house_bound: int, node_limit: int = DEFAULT_NODE_LIMIT) -> list[Elem]:
    """All units with house <= house_bound (complete: house bound caps the
    trace form by d * bound^2)."""
    cap = f.degree * house_bound * house_bound
    out = []
    for vec in f.trace_qlattice.vectors_upto(cap, node_limit):
        e = Elem(f, vec)
        if e.is_zero:
            continue
        if e.norm() in (1, -1):
            hi = f.house(e, Fraction(1, 4))[1]
            if hi <= house_bound:
                out.append(e)
    out.sort(key=Elem.key)
    return out


def unit_in_group(f: Field, units: UnitGroup, u: Elem) -> bool:
    """Exact membership of u in <-1, generators>: float-log exponent solve,
    then exact verification by multiplying out."""
    gens = units.generators
    if not gens:
        return u == f.one or u == -f.one
    width = Fraction(1, 2**40)
    logs_u = [math.log(abs(_mid(f.embedding_interval(u, i, width)))) for i in range(f.degree)]
    logmat = [
        [math.log(abs(_mid(f.embedding_interval(g, i, width)))) for g in gens]
        for i in range(f.degree)
    ]
    approx = _least_squares(logmat, logs_u)
    base = [round(x) for x in approx]
    # the exact check absorbs float error; try a small cube around the solve
    for delta in product((0, 1, -1), repeat=len(gens)):
        cand = [b + dlt for b, dlt in zip(base, delta)]
        v = f.one
        for g, e in zip(gens, cand):
            v = v * (g**e)
        if u == v or u == -v:
            return True
    return False


def verify_unit_group(
    f: Field, units: UnitGroup, house_bound: int = 10, node_limit: int = DEFAULT_NODE_LIMIT
) -> int:
    """Containment cross-check: every unit found by bounded enumeration lies in
    the generated group. Returns the number checked; CatalogIncomplete on failure."""
    checked = 0
    for u in bounded_units(f, house_bound, node_limit):
        if not unit_in_group(f, units, u):
            raise CatalogIncomplete(f"{f.id}: unit {u} outside the catalog-generated group")
        checked += 1
    return checked


def _mid(iv: tuple[Fraction, Fraction]) -> float:
    return float((iv[0] + iv[1]) / 2)


def _least_squares(a: list[list[float]], b: list[float]) -> list[float]:
    """Small dense least squares via normal equations (d <= 4 here)."""
    m = len(a)
    n = len(a[0])
    ata = [[sum(a[r][i] * a[r][j] for r in range(m)) for j in range(n)] for i in range(n)]
    atb = [sum(a[r][i] * b[r] for r in range(m)) for i in range(n)]
    # gaussian elimination with partial pivoting
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(ata[r][col]))
        ata[col], ata[piv] = ata[piv], ata[col]
        atb[col], atb[piv] = atb[piv], atb[col]
        inv = 1.0 / ata[col][col]
        for r in range(n):
            if r != col:
                fct = ata[r][col] * inv
                for c in range(col, n):
                    ata[r][c] -= fct * ata[col][c]
                atb[r] -= fct * atb[col]
    return [atb[i] / ata[i][i] for i in range(n)]


fundamental_unit_quadratic = surd.fundamental_unit_quadratic
