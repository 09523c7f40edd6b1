"""Classical positive definite quadratic forms over the ring of integers:
exact representation testing, unit splitting, diagonal classification, and
the coverage scans.

Representation testing transfers to an integer lattice: Q(v) = alpha forces
Tr(Q(v)) = Tr(alpha), so enumerating the integer trace-form realization at the
exact level Tr(alpha) and filtering by exact evaluation decides alpha -> Q
completely. An empty result is a proof of non-representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from . import cone
from .enumeration import DEFAULT_NODE_LIMIT, QuadLattice
from .errors import (
    ElemSyntaxError,
    InternalCheckError,
    NotAUnit,
    NotClassical,
    NotIntegralHalves,
    NotPositiveDefinite,
    NotRepresented,
    NotSymmetric,
    NotTotallyPositive,
    PreconditionFailed,
)
from .field import Elem, ElemQ, Field, contains_sqrt, sqrt_exact, two_is_ramified
from .linalg import solve_int, zmodule_basis

SHAPE_11A = "Shape11a"
SHAPE_1GA = "Shape1ga"
SHAPE_NOT_APPLICABLE = "NotApplicable"


class GramForm:
    """A classical totally positive definite form given by its Gram matrix.

    Entries are algebraic integers (classicality is a typing fact: rejected at
    parse otherwise); total positive definiteness is certified by exact signs
    of all leading principal minors under every embedding.
    """

    def __init__(self, field: Field, gram: list[list[Elem]]):
        self.field = field
        self.rank = len(gram)
        if self.rank < 1:
            raise NotPositiveDefinite("empty form")
        for row in gram:
            if len(row) != self.rank:
                raise NotSymmetric("gram matrix is not square")
            for e in row:
                if not isinstance(e, Elem):
                    raise NotClassical("gram entries must be algebraic integers")
                field.check_same(e)
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                if gram[i][j] != gram[j][i]:
                    raise NotSymmetric(f"gram[{i}][{j}] != gram[{j}][{i}]")
        self.gram = tuple(tuple(row) for row in gram)
        self._certify_positive_definite()
        self._zreal: QuadLattice | None = None
        self._value_tensor: list[list[tuple[int, ...]]] | None = None
        self._level_cache: dict[int, dict[tuple[int, ...], tuple[int, ...]]] = {}

    # -- validation ------------------------------------------------------------

    def _certify_positive_definite(self) -> None:
        f = self.field
        if self.is_diagonal:
            minors = []
            acc = f.one
            for i in range(self.rank):
                acc = acc * self.gram[i][i]
                minors.append(acc)
        else:
            minors = [
                _elem_det(f, [row[: k + 1] for row in self.gram[: k + 1]])
                for k in range(self.rank)
            ]
        for k, m in enumerate(minors):
            if not m.is_totally_positive():
                raise NotPositiveDefinite(
                    f"leading principal minor {k + 1} is not totally positive"
                )

    @property
    def is_diagonal(self) -> bool:
        return all(
            self.gram[i][j].is_zero
            for i in range(self.rank)
            for j in range(self.rank)
            if i != j
        )

    def diagonal_entries(self) -> tuple[Elem, ...]:
        return tuple(self.gram[i][i] for i in range(self.rank))

    # -- evaluation --------------------------------------------------------------

    def evaluate(self, vector: tuple[Elem, ...]) -> Elem:
        f = self.field
        total = f.zero
        for i in range(self.rank):
            vi = vector[i]
            if vi.is_zero:
                continue
            for j in range(self.rank):
                if vector[j].is_zero:
                    continue
                total = total + self.gram[i][j] * vi * vector[j]
        return total

    def bilinear(self, u: tuple[Elem, ...], v: tuple[Elem, ...]) -> Elem:
        f = self.field
        total = f.zero
        for i in range(self.rank):
            if u[i].is_zero:
                continue
            for j in range(self.rank):
                if not v[j].is_zero:
                    total = total + self.gram[i][j] * u[i] * v[j]
        return total

    # -- integer realization -------------------------------------------------------

    @property
    def zrealization(self) -> QuadLattice:
        """The rd x rd integer trace form: entry ((i,k),(j,l)) = Tr(g_ij w_k w_l)."""
        if self._zreal is None:
            f = self.field
            d = f.degree
            n = self.rank * d
            tg = f.trace_gram
            a = [[0] * n for _ in range(n)]
            for i in range(self.rank):
                for j in range(self.rank):
                    g = self.gram[i][j]
                    if g.is_zero:
                        continue
                    for k in range(d):
                        gk = f.mul_basis(g, k)  # coords of g * w_k
                        for l in range(d):
                            a[i * d + k][j * d + l] = sum(
                                gk[m] * tg[m][l] for m in range(d)
                            )
            self._zreal = QuadLattice(a)
        return self._zreal

    def _tensor(self) -> list[list[tuple[int, ...]]]:
        """Coordinates of g_ij * w_k * w_l for flat indices (i,k), (j,l); lets
        Q(v) be evaluated per enumerated vector in O(nnz^2 * d) integer ops."""
        if self._value_tensor is None:
            f = self.field
            d = f.degree
            n = self.rank * d
            basis = [Elem(f, tuple(int(a == b) for a in range(d))) for b in range(d)]
            tensor = [[(0,) * d] * n for _ in range(n)]
            for i in range(self.rank):
                for j in range(self.rank):
                    g = self.gram[i][j]
                    if g.is_zero:
                        continue
                    for k in range(d):
                        gwk = Elem(f, f.mul_basis(g, k))
                        for l in range(d):
                            tensor[i * d + k][j * d + l] = f.mul_basis(gwk, l)
            self._value_tensor = tensor
        return self._value_tensor

    def _values_at_level(
        self, level: int, node_limit: int = DEFAULT_NODE_LIMIT
    ) -> dict[tuple[int, ...], tuple[int, ...]]:
        """Map {coords of Q(v)} -> lexicographically minimal flat witness vector,
        over all lattice vectors at the exact integer trace level."""
        cached = self._level_cache.get(level)
        if cached is not None:
            return cached
        f = self.field
        d = f.degree
        tensor = self._tensor()
        table: dict[tuple[int, ...], tuple[int, ...]] = {}
        for vec in self.zrealization.vectors_at(level, node_limit):
            nz = [(idx, val) for idx, val in enumerate(vec) if val]
            acc = [0] * d
            for a_i, (ia, va) in enumerate(nz):
                row = tensor[ia]
                for ib, vb in nz:
                    cell = row[ib]
                    fct = va * vb
                    for m in range(d):
                        acc[m] += fct * cell[m]
            key = tuple(acc)
            prev = table.get(key)
            if prev is None or vec < prev:
                table[key] = vec
        self._level_cache[level] = table
        return table

    def __repr__(self) -> str:
        if self.is_diagonal:
            inner = ",".join(str(e) for e in self.diagonal_entries())
            return f"GramForm({self.field.id}: <{inner}>)"
        return f"GramForm({self.field.id}: rank {self.rank})"


@dataclass(frozen=True)
class Witness:
    """v with Q(v) = target; re-evaluated exactly on construction."""

    form: GramForm
    vector: tuple[Elem, ...]
    target: Elem

    def __post_init__(self):
        if self.form.evaluate(self.vector) != self.target:
            raise InternalCheckError("witness does not evaluate to its target")

    def flat_coords(self) -> tuple[int, ...]:
        return tuple(c for e in self.vector for c in e.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.vector) + ")"


def _elem_det(f: Field, rows: list[tuple[Elem, ...]] | list[list[Elem]]) -> Elem:
    n = len(rows)
    total = f.zero
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):  # parity by counting inversions
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = f.one
        for i in range(n):
            term = term * rows[i][perm[i]]
        total = total + term if sign > 0 else total - term
    return total


def diag_form(f: Field, entries: list[Elem]) -> GramForm:
    """The diagonal form with the given totally positive entries."""
    for e in entries:
        f.check_same(e)
        if not e.is_totally_positive():
            raise NotPositiveDefinite(f"diagonal entry {e} is not totally positive")
    r = len(entries)
    gram = [[entries[i] if i == j else f.zero for j in range(r)] for i in range(r)]
    return GramForm(f, gram)


def ones_form(f: Field, count: int) -> GramForm:
    return diag_form(f, [f.one] * count)


def validate(form: GramForm) -> None:
    """Forms are validated on construction; kept as an explicit no-op hook."""
    if not isinstance(form, GramForm):
        raise NotClassical("not a GramForm")


# -- representation ---------------------------------------------------------------


def represents(
    form: GramForm, alpha: Elem, node_limit: int = DEFAULT_NODE_LIMIT
) -> Witness | None:
    """The canonical witness with Q(v) = alpha, or None (a proof of
    non-representation; budget overruns raise instead of returning None)."""
    f = form.field
    f.check_same(alpha)
    if alpha.is_zero:
        return Witness(form, (f.zero,) * form.rank, alpha)
    if not alpha.is_totally_positive():
        raise NotTotallyPositive(f"{alpha} is not totally positive")
    table = form._values_at_level(alpha.trace(), node_limit)
    flat = table.get(alpha.coords)
    if flat is None:
        return None
    return Witness(form, _unflatten(f, form.rank, flat), alpha)


def _unflatten(f: Field, rank: int, flat: tuple[int, ...]) -> tuple[Elem, ...]:
    d = f.degree
    return tuple(Elem(f, flat[i * d : (i + 1) * d]) for i in range(rank))


@dataclass(frozen=True)
class UniversalityResult:
    all_represented: bool
    counterexample: Elem | None
    trace_bound: int
    checked: int


def is_universal_up_to(
    form: GramForm, trace_bound: int, node_limit: int = DEFAULT_NODE_LIMIT
) -> UniversalityResult:
    """Checks every totally positive integer with trace <= bound. A
    counterexample is an exact non-universality proof; full coverage is
    bounded evidence only."""
    f = form.field
    checked = 0
    for alpha in cone.enumerate_tp_by_trace(f, trace_bound, node_limit):
        if represents(form, alpha, node_limit) is None:
            return UniversalityResult(False, alpha, trace_bound, checked)
        checked += 1
    return UniversalityResult(True, None, trace_bound, checked)


# -- unit splitting ----------------------------------------------------------------


def split_off_unit(
    form: GramForm, eps: Elem, node_limit: int = DEFAULT_NODE_LIMIT
) -> tuple[tuple[tuple[Elem, ...], ...], GramForm]:
    """Basis change U (unit determinant, columns over O_K) with
    U^T G U = blockdiag(eps, G'); returns (U as rows, the rank r-1 rest form).

    Construction: v represents eps; the orthogonal complement is generated by
    the projections e_i - eps^{-1} B(e_i, v) v (integral because eps is a
    unit), and a basis is extracted by column Hermite reduction over the ring.
    """
    f = form.field
    r = form.rank
    if abs(eps.norm()) != 1:
        raise NotAUnit(f"{eps} has norm {eps.norm()}")
    if not eps.is_totally_positive():
        raise NotAUnit(f"{eps} is not totally positive")
    w = represents(form, eps, node_limit)
    if w is None:
        raise NotRepresented(f"{form!r} does not represent {eps}")
    v = w.vector
    eps_inv = f.unit_inverse(eps)
    basis_vectors = [tuple(f.one if a == i else f.zero for a in range(r)) for i in range(r)]
    gv = [form.bilinear(basis_vectors[i], v) for i in range(r)]
    complements = []
    for i in range(r):
        c = eps_inv * gv[i]
        complements.append(tuple(basis_vectors[i][a] - c * v[a] for a in range(r)))
    cols = _ok_column_hnf(f, complements)
    if len(cols) != r - 1:
        raise InternalCheckError(f"complement Hermite reduction gave rank {len(cols)}")
    u_cols = [v] + cols
    det = _elem_det(f, [[u_cols[c][row] for c in range(r)] for row in range(r)])
    if abs(det.norm()) != 1:
        raise InternalCheckError("splitting transform is not unimodular")
    block = [[form.bilinear(u_cols[a], u_cols[b]) for b in range(r)] for a in range(r)]
    if block[0][0] != eps:
        raise InternalCheckError("split block (0,0) is not the unit")
    for a in range(1, r):
        if not (block[0][a].is_zero and block[a][0].is_zero):
            raise InternalCheckError("split block is not orthogonal")
    rest = GramForm(f, [[block[a][b] for b in range(1, r)] for a in range(1, r)])
    transform_rows = tuple(
        tuple(u_cols[c][row] for c in range(r)) for row in range(r)
    )
    return transform_rows, rest


def _ok_exact_div(f: Field, a: Elem, g: Elem) -> Elem:
    """a / g in the ring of integers (g must divide a exactly)."""
    sol = solve_int(
        [[f.mul_basis(g, i)[m] for i in range(f.degree)] for m in range(f.degree)],
        list(a.coords),
    )
    if sol is None:
        raise InternalCheckError(f"inexact division {a} / {g}")
    return Elem(f, tuple(sol))


def _ok_gcd(f: Field, a: Elem, b: Elem) -> tuple[Elem, Elem, Elem]:
    """(g, x, y) with x*a + y*b = g and (a, b) = (g) as ideals.

    Finds a generator of the Z-module ideal by enumerating short ideal
    elements until one of norm = ideal norm appears (class number one; fails
    loudly otherwise)."""
    if b.is_zero:
        g, x = (a, f.one) if a.sign_at(0) > 0 else (-a, -f.one)
        return g, x, f.zero
    if a.is_zero:
        g, y = (b, f.one) if b.sign_at(0) > 0 else (-b, -f.one)
        return g, f.zero, y
    d = f.degree
    gens = [list(f.mul_basis(a, k)) for k in range(d)] + [
        list(f.mul_basis(b, k)) for k in range(d)
    ]
    basis = zmodule_basis(gens)
    from .linalg import int_det

    ideal_norm = abs(int_det(basis))
    tg = f.trace_gram
    gram = [
        [
            sum(basis[i][m] * tg[m][l] * basis[j][l] for m in range(d) for l in range(d))
            for j in range(d)
        ]
        for i in range(d)
    ]
    lattice = QuadLattice(gram)
    bound = max(gram[i][i] for i in range(d))
    best: Elem | None = None
    for _ in range(24):
        for y in lattice.vectors_upto(bound):
            coords = tuple(sum(y[i] * basis[i][m] for i in range(d)) for m in range(d))
            e = Elem(f, coords)
            if e.is_zero:
                continue
            if abs(e.norm()) == ideal_norm:
                if e.sign_at(0) < 0:
                    e = -e
                if best is None or e.key() < best.key():
                    best = e
        if best is not None:
            break
        bound *= 2
    if best is None:
        raise InternalCheckError(
            "no ideal generator found; field may not have class number one"
        )
    cols = [list(f.mul_basis(a, k)) for k in range(d)] + [
        list(f.mul_basis(b, k)) for k in range(d)
    ]
    mat = [[cols[c][m] for c in range(2 * d)] for m in range(d)]
    sol = solve_int(mat, list(best.coords))
    if sol is None:
        raise InternalCheckError("ideal generator is not a combination of a and b")
    x = Elem(f, tuple(sol[:d]))
    y = Elem(f, tuple(sol[d:]))
    if x * a + y * b != best:
        raise InternalCheckError("bezout combination check failed")
    return best, x, y


def _ok_column_hnf(f: Field, columns: list[tuple[Elem, ...]]) -> list[tuple[Elem, ...]]:
    """Column Hermite reduction over the ring of integers; returns the nonzero
    echelon columns (a basis of the column module)."""
    cols = [list(col) for col in columns]
    nrows = len(cols[0]) if cols else 0
    pivot_cols: set[int] = set()
    for row in range(nrows):
        active = [c for c in range(len(cols)) if c not in pivot_cols and not cols[c][row].is_zero]
        if not active:
            continue
        acc = active[0]
        for c in active[1:]:
            a_, b_ = cols[acc][row], cols[c][row]
            g, x, y = _ok_gcd(f, a_, b_)
            adg = _ok_exact_div(f, a_, g)
            bdg = _ok_exact_div(f, b_, g)
            new_acc = [x * cols[acc][i] + y * cols[c][i] for i in range(nrows)]
            new_c = [adg * cols[c][i] - bdg * cols[acc][i] for i in range(nrows)]
            cols[acc], cols[c] = new_acc, new_c
        pivot_cols.add(acc)
    out = []
    for c in range(len(cols)):
        if c in pivot_cols:
            out.append(tuple(cols[c]))
        elif any(not e.is_zero for e in cols[c]):
            raise InternalCheckError("non-pivot column failed to vanish in Hermite reduction")
    return out


# -- unary corepresentation and diagonal classification ------------------------------


def unary_corepresent(f: Field, alpha: Elem, beta: Elem, node_limit: int = DEFAULT_NODE_LIMIT) -> bool:
    """True iff some unary lattice represents both, i.e. alpha*beta is a square."""
    for e in (alpha, beta):
        f.check_same(e)
        if not e.is_totally_positive():
            raise NotTotallyPositive(f"{e} is not totally positive")
    return sqrt_exact(f, alpha * beta) is not None


@dataclass(frozen=True)
class DiagonalShape:
    kind: str  # SHAPE_11A | SHAPE_1GA | SHAPE_NOT_APPLICABLE
    alpha: Elem | None = None
    gamma: Elem | None = None
    scale: Elem | None = None  # t with 2 = gamma * t^2


def classify_diagonal_ternary(
    form: GramForm, node_limit: int = DEFAULT_NODE_LIMIT
) -> DiagonalShape:
    """Normal form of a diagonal ternary representing 1 and 2 (sqrt2 not in K):
    <1,1,alpha>, or <1,gamma,alpha> with 2 = gamma*t^2. Prefers the first."""
    f = form.field
    if form.rank != 3 or not form.is_diagonal:
        raise PreconditionFailed("classification needs a diagonal ternary form")
    if contains_sqrt(f, 2) is not None:
        raise PreconditionFailed("sqrt2 lies in the field")
    entries = form.diagonal_entries()
    unary = [diag_form(f, [e]) for e in entries]
    ones = [i for i in range(3) if represents(unary[i], f.one, node_limit) is not None]
    if not ones:
        raise PreconditionFailed("form does not represent 1")
    if len(ones) >= 2:
        rest = [i for i in range(3) if i not in ones[:2]]
        return DiagonalShape(SHAPE_11A, alpha=entries[rest[0]])
    two_wit = None
    two_idx = None
    for i in range(3):
        if i in ones:
            continue
        w = represents(unary[i], f.from_int(2), node_limit)
        if w is not None:
            two_wit = w.vector[0]
            two_idx = i
            break
    if two_idx is None:
        raise PreconditionFailed("form does not represent 2")
    rest = [i for i in range(3) if i != ones[0] and i != two_idx]
    return DiagonalShape(
        SHAPE_1GA, alpha=entries[rest[0]], gamma=entries[two_idx], scale=two_wit
    )


# -- coverage scans --------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageResult:
    all_covered: bool
    counterexample: Elem | None
    trace_bound: int
    checked: int
    form_label: str


def check_1122_coverage(
    f: Field, trace_bound: int, node_limit: int = DEFAULT_NODE_LIMIT
) -> CoverageResult:
    """Does <1,1,2,2> represent 2*alpha for every alpha with Tr(alpha) <= bound?"""
    form = diag_form(f, [f.one, f.one, f.from_int(2), f.from_int(2)])
    checked = 0
    for alpha in cone.enumerate_tp_by_trace(f, trace_bound, node_limit):
        if represents(form, 2 * alpha, node_limit) is None:
            return CoverageResult(False, alpha, trace_bound, checked, "<1,1,2,2>")
        checked += 1
    return CoverageResult(True, None, trace_bound, checked, "<1,1,2,2>")


def check_lambda_coverage(
    f: Field, lam: Elem, trace_bound: int, node_limit: int = DEFAULT_NODE_LIMIT
) -> CoverageResult:
    """Does <1,1,lam,lam> represent lam*alpha for all alpha with Tr <= bound?
    Requires lam indecomposable (exact check) and nonsquare."""
    f.check_same(lam)
    if sqrt_exact(f, lam) is not None:
        raise PreconditionFailed(f"{lam} is a square")
    if not cone.is_indecomposable(f, lam, node_limit).is_indecomposable:
        raise PreconditionFailed(f"{lam} is decomposable")
    form = diag_form(f, [f.one, f.one, lam, lam])
    label = f"<1,1,{lam},{lam}>"
    checked = 0
    for alpha in cone.enumerate_tp_by_trace(f, trace_bound, node_limit):
        if represents(form, lam * alpha, node_limit) is None:
            return CoverageResult(False, alpha, trace_bound, checked, label)
        checked += 1
    return CoverageResult(True, None, trace_bound, checked, label)


# -- witness transfers -------------------------------------------------------------------


def four_square_witness_from_1122(w: Witness) -> Witness:
    """(x,y,z,w) for <1,1,2,2> at 2a becomes (x,y,z+w,z-w) for <1,1,1,1> at 2a,
    by 2z^2 + 2w^2 = (z+w)^2 + (z-w)^2."""
    f = w.form.field
    expected = diag_form(f, [f.one, f.one, f.from_int(2), f.from_int(2)])
    if w.form.gram != expected.gram:
        raise PreconditionFailed("witness is not for <1,1,2,2>")
    x, y, z, ww = w.vector
    return Witness(ones_form(f, 4), (x, y, z + ww, z - ww), w.target)


def halve_witness_unramified(f: Field, alpha: Elem, w: Witness) -> Witness:
    """From x^2+y^2+2z^2+2w^2 = 2*alpha, produce the four-square witness
    ((x+y)/2, (x-y)/2, z, w) for alpha. The halves are integral exactly when 2
    is unramified; NotIntegralHalves otherwise."""
    f.check_same(alpha)
    if two_is_ramified(f):
        raise NotIntegralHalves("2 is ramified (even discriminant)")
    expected = diag_form(f, [f.one, f.one, f.from_int(2), f.from_int(2)])
    if w.form.gram != expected.gram or w.target != 2 * alpha:
        raise NotIntegralHalves("witness is not a <1,1,2,2> representation of 2*alpha")
    x, y, z, ww = w.vector
    half_sum = (x + y) / 2
    half_diff = (x - y) / 2
    if not (half_sum.is_integral and half_diff.is_integral):
        raise NotIntegralHalves(f"(x+y)/2 not integral for witness {w}")
    return Witness(ones_form(f, 4), (half_sum.to_elem(), half_diff.to_elem(), z, ww), alpha)


# -- form grammar -----------------------------------------------------------------------


def parse_form(f: Field, s: str) -> GramForm:
    """Diagonal ``<a1,...,ar>`` or full Gram ``[[g11,...],[...],...]``; entries
    use the element grammar and must be algebraic integers (classical)."""
    text = s.strip()
    if text.startswith("<") and text.endswith(">"):
        entries = [_parse_entry(f, piece) for piece in text[1:-1].split(",")]
        return diag_form(f, entries)
    if text.startswith("[") and text.endswith("]"):
        rows = _split_rows(text[1:-1])
        gram = [[_parse_entry(f, cell) for cell in row] for row in rows]
        return GramForm(f, gram)
    raise ElemSyntaxError(f"form must be <...> or [[...],...]: {s!r}")


def _parse_entry(f: Field, s: str) -> Elem:
    val = f.parse(s, allow_rational=True)
    if isinstance(val, ElemQ):
        raise NotClassical(f"form entry {s!r} is not an algebraic integer")
    return val


def _split_rows(body: str) -> list[list[str]]:
    rows: list[list[str]] = []
    depth = 0
    current = ""
    cells: list[str] = []
    for ch in body:
        if ch == "[":
            depth += 1
            if depth == 1:
                cells = []
                current = ""
                continue
        elif ch == "]":
            depth -= 1
            if depth == 0:
                cells.append(current)
                rows.append(cells)
                current = ""
                continue
            if depth < 0:
                raise ElemSyntaxError("unbalanced brackets in gram matrix")
        elif ch == "," and depth == 1:
            cells.append(current)
            current = ""
            continue
        elif ch == "," and depth == 0:
            continue
        if depth >= 1:
            current += ch
    if depth != 0:
        raise ElemSyntaxError("unbalanced brackets in gram matrix")
    if not rows:
        raise ElemSyntaxError("empty gram matrix")
    return rows
