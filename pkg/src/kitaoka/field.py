"""Totally real number fields with fully exact arithmetic.

A field is realized by a monic integer defining polynomial together with an
explicit integral basis (rational coordinates in the power basis of a fixed
root t). Elements are integer coordinate vectors over that basis; every
operation -- ring arithmetic, traces, norms, embedding signs -- is exact.
Embeddings are ordered by ascending real root and their signs are certified by
integer interval arithmetic over Sturm-isolated root intervals.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import gcd

from . import linalg, polys
from .enumeration import QuadLattice
from .errors import (
    BasisNotClosed,
    DiscriminantMismatch,
    ElemSyntaxError,
    FieldMismatch,
    InternalCheckError,
    NotIntegral,
    UnknownField,
)

_MIN_ROOT_WIDTH = Fraction(1, 2**4096)  # refinement fuse: past this it's a bug


@dataclass(frozen=True)
class FieldSpec:
    """Catalog description of a totally real field; validated by load_field."""

    id: str
    degree: int
    poly: tuple[int, ...]  # constant term first, monic
    integral_basis: tuple[tuple[Fraction, ...], ...]
    unit_generators: tuple[str, ...]
    disc: int
    known_positive: bool = False

    @classmethod
    def from_json_dict(cls, data: dict) -> "FieldSpec":
        return cls(
            id=data["id"],
            degree=int(data["degree"]),
            poly=tuple(int(c) for c in data["poly"]),
            integral_basis=tuple(
                tuple(Fraction(entry) for entry in row) for row in data["integral_basis"]
            ),
            unit_generators=tuple(data.get("units", ())),
            disc=int(data["disc"]),
            known_positive=bool(data.get("known_positive", False)),
        )


@dataclass(frozen=True)
class Elem:
    """An algebraic integer: exact integer coordinates over the integral basis."""

    field: "Field"
    coords: tuple[int, ...]

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "Elem | int") -> "Elem":
        if isinstance(other, int):
            other = self.field.from_int(other)
        self.field.check_same(other)
        return Elem(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __sub__(self, other: "Elem | int") -> "Elem":
        if isinstance(other, int):
            other = self.field.from_int(other)
        self.field.check_same(other)
        return Elem(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other: "Elem | int") -> "Elem":
        return (-self).__add__(other)

    def __neg__(self) -> "Elem":
        return Elem(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, int):
            return Elem(self.field, tuple(other * a for a in self.coords))
        self.field.check_same(other)
        return self.field.mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int) -> "Elem":
        if n < 0:
            inv = self.field.unit_inverse(self)
            return inv ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, n: int) -> "ElemQ":
        return ElemQ(self.field, tuple(Fraction(a, n) for a in self.coords))

    def trace(self) -> int:
        return self.field.trace(self)

    def norm(self) -> int:
        return self.field.norm(self)

    def trace_abs(self) -> Fraction:
        return Fraction(self.trace(), self.field.degree)

    def sign_at(self, i: int) -> int:
        return self.field.sign_at(self, i)

    def signs(self) -> tuple[int, ...]:
        return self.field.signs(self)

    def is_totally_positive(self) -> bool:
        return not self.is_zero and all(s > 0 for s in self.signs())

    def is_totally_nonneg(self) -> bool:
        return self.is_zero or self.is_totally_positive()

    def house(self, prec: Fraction = Fraction(1, 2**20)) -> tuple[Fraction, Fraction]:
        return self.field.house(self, prec)

    def key(self) -> tuple:
        """Canonical sort key: ascending trace, then lexicographic coordinates."""
        return (self.trace(), self.coords)

    def __str__(self) -> str:
        return self.field.format(self)

    def __repr__(self) -> str:
        return f"Elem({self.field.id}: {self})"


@dataclass(frozen=True)
class ElemQ:
    """Rational-coordinate element of K (intermediate values, e.g. halving)."""

    field: "Field"
    coords: tuple[Fraction, ...]

    @classmethod
    def from_elem(cls, a: Elem) -> "ElemQ":
        return cls(a.field, tuple(Fraction(c) for c in a.coords))

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def to_elem(self) -> Elem:
        if not self.is_integral:
            raise NotIntegral(f"{self.field.format(self)} is not an algebraic integer")
        return Elem(self.field, tuple(int(c) for c in self.coords))

    def __add__(self, other: "ElemQ") -> "ElemQ":
        self.field.check_same(other)
        return ElemQ(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "ElemQ") -> "ElemQ":
        self.field.check_same(other)
        return ElemQ(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "ElemQ":
        return ElemQ(self.field, tuple(-a for a in self.coords))

    def __str__(self) -> str:
        return self.field.format(self)

    def __repr__(self) -> str:
        return f"ElemQ({self.field.id}: {self})"


class Field:
    """A loaded, validated totally real number field.

    Immutable after construction; the root intervals only ever shrink (guarded
    by a lock), so all element operations are safe for concurrent use and
    deterministic regardless of scheduling.
    """

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.id = spec.id
        d = spec.degree
        self.degree = d
        if d < 1:
            raise BasisNotClosed("degree must be >= 1")
        if len(spec.poly) != d + 1 or spec.poly[d] != 1:
            raise BasisNotClosed("defining polynomial must be monic of the stated degree")
        if len(spec.integral_basis) != d or any(len(r) != d for r in spec.integral_basis):
            raise BasisNotClosed("integral basis must be d rows of d rational coordinates")
        if spec.integral_basis[0] != (Fraction(1),) + (Fraction(0),) * (d - 1):
            raise BasisNotClosed("integral basis row 0 must represent 1")

        self._fpoly = [Fraction(c) for c in spec.poly]
        # Sturm certificate: d distinct real roots, isolated and ordered
        self._roots = polys.isolate_real_roots(self._fpoly, d)
        self._roots_lock = threading.Lock()

        self._basis = [list(row) for row in spec.integral_basis]
        try:
            self._basis_inv = linalg.frac_inverse(self._basis)
        except ZeroDivisionError:
            raise BasisNotClosed("integral basis rows are linearly dependent") from None

        # scaled integer basis for sign evaluation: row j holds D * (power
        # coefficients of basis element j)
        self._basis_den = 1
        for row in self._basis:
            for c in row:
                self._basis_den = self._basis_den // gcd(self._basis_den, c.denominator) * c.denominator
        self._basis_scaled = [
            [int(c * self._basis_den) for c in row] for row in self._basis
        ]

        self._mult_table = self._build_mult_table()
        self._trace_vec = self._build_trace_vec()
        self.trace_gram = [
            [
                sum(self._mult_table[i][j][k] * self._trace_vec[k] for k in range(d))
                for j in range(d)
            ]
            for i in range(d)
        ]
        found_disc = linalg.int_det(self.trace_gram)
        if found_disc != spec.disc:
            raise DiscriminantMismatch(
                f"trace form determinant {found_disc} != declared discriminant {spec.disc}"
            )

        self.zero = Elem(self, (0,) * d)
        self.one = Elem(self, (1,) + (0,) * (d - 1))
        self.gen = self._power_vector_to_elem([Fraction(0), Fraction(1)] + [Fraction(0)] * (d - 2)) if d >= 2 else self.zero

        self._trace_qlattice: QuadLattice | None = None
        self.cache: dict = {}  # memo space for higher layers (enumerations etc.)
        self.refine_roots(Fraction(1, 2**64))

    # -- construction internals ------------------------------------------------

    def _build_mult_table(self):
        d = self.degree
        table = []
        for i in range(d):
            row = []
            bi = self._basis[i]
            for j in range(d):
                prod = polys.poly_mul(bi, self._basis[j])
                red = polys.poly_mod(prod, self._fpoly)
                red += [Fraction(0)] * (d - len(red))
                coords = self._power_to_coords(red[:d])
                ints = []
                for c in coords:
                    if c.denominator != 1:
                        raise BasisNotClosed(
                            f"product of basis elements {i},{j} is not integral over the basis"
                        )
                    ints.append(int(c))
                row.append(tuple(ints))
            table.append(tuple(row))
        return tuple(table)

    def _build_trace_vec(self):
        d = self.degree
        a = self.spec.poly
        psums = [d]
        for k in range(1, d):
            s = -k * a[d - k]
            for i in range(1, k):
                s -= a[d - i] * psums[k - i]
            psums.append(s)
        vec = []
        for row in self._basis:
            t = sum(row[k] * psums[k] for k in range(d))
            if t.denominator != 1:
                raise BasisNotClosed("basis element has non-integral trace")
            vec.append(int(t))
        return vec

    def _power_to_coords(self, power: list[Fraction]) -> list[Fraction]:
        inv = self._basis_inv
        d = self.degree
        return [sum(power[k] * inv[k][j] for k in range(d)) for j in range(d)]

    def _power_vector_to_elem(self, power: list[Fraction]) -> Elem:
        coords = self._power_to_coords(power)
        if any(c.denominator != 1 for c in coords):
            raise NotIntegral("element is not integral over the integral basis")
        return Elem(self, tuple(int(c) for c in coords))

    # -- element constructors ---------------------------------------------------

    def elem(self, coords) -> Elem:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.degree:
            raise FieldMismatch(f"expected {self.degree} coordinates")
        return Elem(self, coords)

    def from_int(self, n: int) -> Elem:
        return Elem(self, (n,) + (0,) * (self.degree - 1))

    def check_same(self, other) -> None:
        if other.field is not self:
            raise FieldMismatch(f"element of {other.field.id} used in {self.id}")

    # -- ring arithmetic ---------------------------------------------------------

    def mul(self, a: Elem, b: Elem) -> Elem:
        d = self.degree
        table = self._mult_table
        out = [0] * d
        for i in range(d):
            ai = a.coords[i]
            if not ai:
                continue
            ti = table[i]
            for j in range(d):
                bj = b.coords[j]
                if not bj:
                    continue
                cij = ti[j]
                f = ai * bj
                for m in range(d):
                    out[m] += f * cij[m]
        return Elem(self, tuple(out))

    def mul_basis(self, a: Elem, j: int) -> tuple[int, ...]:
        """Coordinates of a * omega_j."""
        d = self.degree
        table = self._mult_table
        out = [0] * d
        for i in range(d):
            ai = a.coords[i]
            if ai:
                cij = table[i][j]
                for m in range(d):
                    out[m] += ai * cij[m]
        return tuple(out)

    def regular_matrix(self, a: Elem) -> list[list[int]]:
        """Matrix of multiplication by a over the integral basis (row i = a*omega_i)."""
        return [list(self.mul_basis(a, i)) for i in range(self.degree)]

    def trace(self, a: Elem) -> int:
        return sum(t * c for t, c in zip(self._trace_vec, a.coords))

    def norm(self, a: Elem) -> int:
        return linalg.int_det(self.regular_matrix(a))

    def unit_inverse(self, a: Elem) -> Elem:
        """Exact inverse of a unit (norm +-1); raises if a is not a unit."""
        sol = linalg.solve_int(
            [[self.mul_basis(a, i)[m] for i in range(self.degree)] for m in range(self.degree)],
            list(self.one.coords),
        )
        if sol is None:
            raise NotIntegral(f"{self.format(a)} is not invertible in the ring of integers")
        return Elem(self, tuple(sol))

    # -- embeddings and signs ----------------------------------------------------

    def root_interval(self, i: int) -> tuple[Fraction, Fraction]:
        return self._roots[i]

    def refine_roots(self, width: Fraction) -> None:
        with self._roots_lock:
            self._roots = [
                polys.refine_root(self._fpoly, lo, hi, width) for lo, hi in self._roots
            ]

    def _refine_one(self, i: int) -> None:
        with self._roots_lock:
            lo, hi = self._roots[i]
            if lo != hi:
                w = (hi - lo) / 2
                if w < _MIN_ROOT_WIDTH:
                    raise InternalCheckError("root refinement fuse blown; sign undecidable")
                roots = list(self._roots)
                roots[i] = polys.refine_root(self._fpoly, lo, hi, w)
                self._roots = roots

    def scaled_power_coeffs(self, a) -> list[int] | None:
        """Integer coefficients of D * (power-basis polynomial of a), or None for 0.

        Works for Elem and for ElemQ (the latter scaled by its coordinate lcm,
        which does not affect signs).
        """
        coords = a.coords
        if not any(coords):
            return None
        if isinstance(a, ElemQ):
            den = 1
            for c in coords:
                den = den // gcd(den, c.denominator) * c.denominator
            coords = [int(c * den) for c in coords]
        d = self.degree
        rows = self._basis_scaled
        return [sum(coords[j] * rows[j][k] for j in range(d)) for k in range(d)]

    def _sign_from_coeffs(self, sp: list[int], i: int) -> int:
        while True:
            lo, hi = self._roots[i]
            if lo == hi:
                val = polys.poly_eval([Fraction(c) for c in sp], lo)
                if val == 0:
                    raise InternalCheckError("nonzero element vanishes at a rational root")
                return 1 if val > 0 else -1
            den = max(lo.denominator, hi.denominator)
            a_, b_, _ = polys.interval_eval_int(
                sp, lo.numerator * (den // lo.denominator), hi.numerator * (den // hi.denominator), den
            )
            if a_ > 0:
                return 1
            if b_ < 0:
                return -1
            self._refine_one(i)

    def sign_at(self, a, i: int) -> int:
        if not 0 <= i < self.degree:
            raise FieldMismatch(f"embedding index {i} out of range")
        sp = self.scaled_power_coeffs(a)
        if sp is None:
            return 0
        return self._sign_from_coeffs(sp, i)

    def signs(self, a) -> tuple[int, ...]:
        sp = self.scaled_power_coeffs(a)
        if sp is None:
            return (0,) * self.degree
        return tuple(self._sign_from_coeffs(sp, i) for i in range(self.degree))

    def embedding_interval(self, a, i: int, width: Fraction) -> tuple[Fraction, Fraction]:
        """Exact rational interval of width <= ``width`` containing sigma_i(a)."""
        sp = self.scaled_power_coeffs(a)
        if sp is None:
            return Fraction(0), Fraction(0)
        scale_out = self._basis_den if isinstance(a, Elem) else None
        if scale_out is None:
            # ElemQ path: recompute its own scale
            den = 1
            for c in a.coords:
                den = den // gcd(den, c.denominator) * c.denominator
            scale_out = self._basis_den * den
        while True:
            lo, hi = self._roots[i]
            if lo == hi:
                v = polys.poly_eval([Fraction(c) for c in sp], lo) / scale_out
                return v, v
            den = max(lo.denominator, hi.denominator)
            a_, b_, sc = polys.interval_eval_int(
                sp, lo.numerator * (den // lo.denominator), hi.numerator * (den // hi.denominator), den
            )
            vlo = Fraction(a_, sc * scale_out)
            vhi = Fraction(b_, sc * scale_out)
            if vhi - vlo <= width:
                return vlo, vhi
            self._refine_one(i)

    def house(self, a, prec: Fraction = Fraction(1, 2**20)) -> tuple[Fraction, Fraction]:
        """Interval of width <= prec containing max_i |sigma_i(a)|."""
        if not any(a.coords):
            return Fraction(0), Fraction(0)
        best_lo = best_hi = None
        for i in range(self.degree):
            vlo, vhi = self.embedding_interval(a, i, prec)
            alo, ahi = (vlo, vhi) if vlo >= 0 else ((-vhi, -vlo) if vhi <= 0 else (Fraction(0), max(-vlo, vhi)))
            if best_lo is None or alo > best_lo:
                best_lo = alo
            if best_hi is None or ahi > best_hi:
                best_hi = ahi
        return best_lo, best_hi

    # -- trace form --------------------------------------------------------------

    @property
    def trace_qlattice(self) -> QuadLattice:
        if self._trace_qlattice is None:
            self._trace_qlattice = QuadLattice(self.trace_gram)
        return self._trace_qlattice

    # -- parsing and formatting ---------------------------------------------------

    def parse(self, s: str, allow_rational: bool = False):
        power = _parse_power_coeffs(s)
        # reduce exponents >= d modulo the defining polynomial
        maxdeg = max(power) if power else 0
        vec = [Fraction(0)] * (maxdeg + 1)
        for k, c in power.items():
            vec[k] = c
        if maxdeg >= self.degree:
            vec = polys.poly_mod(vec, self._fpoly)
        vec += [Fraction(0)] * (self.degree - len(vec))
        coords = self._power_to_coords(vec[: self.degree])
        if all(c.denominator == 1 for c in coords):
            return Elem(self, tuple(int(c) for c in coords))
        if allow_rational:
            return ElemQ(self, tuple(coords))
        raise NotIntegral(f"{s!r} is not an algebraic integer of {self.id}")

    def power_coords(self, a) -> list[Fraction]:
        d = self.degree
        return [
            sum(Fraction(a.coords[j]) * self._basis[j][k] for j in range(d))
            for k in range(d)
        ]

    def format(self, a) -> str:
        p = self.power_coords(a)
        parts: list[str] = []
        for k in range(len(p) - 1, -1, -1):
            c = p[k]
            if not c:
                continue
            mag = abs(c)
            coef = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            if k == 0:
                body = coef
            else:
                tpart = "t" if k == 1 else f"t^{k}"
                body = tpart if mag == 1 else f"{coef}*{tpart}"
            sign = "-" if c < 0 else ("" if not parts else "+")
            parts.append(sign + body)
        return "".join(parts) or "0"

    def __repr__(self) -> str:
        return f"Field({self.id}, degree {self.degree}, disc {self.spec.disc})"


def load_field(spec: FieldSpec) -> Field:
    """Validate a field spec and realize it (Sturm certificate, ring closure,
    discriminant cross-check)."""
    return Field(spec)


def two_is_ramified(f: Field) -> bool:
    """2 ramifies iff it divides the discriminant."""
    return f.spec.disc % 2 == 0


def contains_sqrt(f: Field, n: int):
    """A canonical beta with beta^2 = n if sqrt(n) lies in the field, else None.

    Sign convention for square roots everywhere: first embedding positive.
    """
    if n < 1:
        raise NotIntegral("n must be a positive integer")
    return sqrt_exact(f, f.from_int(n))


def sqrt_exact(f: Field, a: Elem):
    """Exact square root in the ring of integers, or None.

    Delegates to unary-form representation; the canonical root has positive
    first embedding.
    """
    from . import lattice  # deferred: representation engine sits above field core

    if a.is_zero:
        return f.zero
    if not a.is_totally_positive():
        return None
    w = lattice.represents(lattice.diag_form(f, [f.one]), a)
    if w is None:
        return None
    beta = w.vector[0]
    if beta.sign_at(0) < 0:
        beta = -beta
    return beta


# -- element grammar -----------------------------------------------------------


def _tokenize(s: str) -> list[str]:
    out: list[str] = []
    i = 0
    n = len(s)
    while i < n:
        ch = s[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and s[j].isdigit():
                j += 1
            out.append(s[i:j])
            i = j
            continue
        if ch in "t^*/+-":
            out.append(ch)
            i += 1
            continue
        raise ElemSyntaxError(f"unexpected character {ch!r} in element expression")
    return out


class _ElemParser:
    def __init__(self, tokens: list[str]):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def nat(self) -> int:
        tok = self.take()
        if tok is None or not tok.isdigit():
            raise ElemSyntaxError(f"expected a natural number, got {tok!r}")
        return int(tok)

    def power(self) -> int:
        if self.peek() == "^":
            self.take()
            return self.nat()
        return 1

    def term(self) -> tuple[int, Fraction]:
        tok = self.peek()
        if tok == "t":
            self.take()
            return self.power(), Fraction(1)
        if tok is None or not tok.isdigit():
            raise ElemSyntaxError(f"expected coefficient or t, got {tok!r}")
        self.take()
        num = int(tok)
        den = 1
        if self.peek() == "/":
            self.take()
            den = self.nat()
            if den == 0:
                raise ElemSyntaxError("zero denominator")
        coef = Fraction(num, den)
        if self.peek() == "*":
            self.take()
            if self.take() != "t":
                raise ElemSyntaxError("expected t after '*'")
            return self.power(), coef
        return 0, coef

    def expr(self) -> dict[int, Fraction]:
        coeffs: dict[int, Fraction] = {}
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        while True:
            deg, c = self.term()
            coeffs[deg] = coeffs.get(deg, Fraction(0)) + sign * c
            tok = self.peek()
            if tok is None:
                return coeffs
            if tok not in ("+", "-"):
                raise ElemSyntaxError(f"expected '+' or '-', got {tok!r}")
            self.take()
            sign = -1 if tok == "-" else 1


def _parse_power_coeffs(s: str) -> dict[int, Fraction]:
    tokens = _tokenize(s)
    if not tokens:
        raise ElemSyntaxError("empty element expression")
    return _ElemParser(tokens).expr()


def parse_elem(f: Field, s: str, allow_rational: bool = False):
    return f.parse(s, allow_rational=allow_rational)


def format_elem(a) -> str:
    return a.field.format(a)


# -- catalog -------------------------------------------------------------------


class Catalog:
    """A set of field specs; loads and caches Field instances by id."""

    def __init__(self, specs: dict[str, FieldSpec]):
        self.specs = specs
        self._fields: dict[str, Field] = {}

    @classmethod
    def from_documents(cls, *documents: list[dict]) -> "Catalog":
        specs: dict[str, FieldSpec] = {}
        for doc in documents:
            for entry in doc:
                spec = FieldSpec.from_json_dict(entry)
                specs[spec.id] = spec  # later documents override earlier ones
        return cls(specs)

    @classmethod
    def builtin(cls) -> "Catalog":
        return cls.from_documents(_builtin_document())

    @classmethod
    def with_extra(cls, path: str | None) -> "Catalog":
        if not path:
            return cls.builtin()
        with open(path, encoding="utf-8") as fh:
            extra = json.load(fh)
        return cls.from_documents(_builtin_document(), extra)

    def ids(self) -> list[str]:
        return sorted(self.specs)

    def field(self, fid: str) -> Field:
        if fid not in self._fields:
            if fid not in self.specs:
                raise UnknownField(f"no field {fid!r} in the catalog")
            self._fields[fid] = load_field(self.specs[fid])
        return self._fields[fid]


@lru_cache(maxsize=1)
def _builtin_document_cached() -> str:
    return resources.files("kitaoka").joinpath("catalog.json").read_text(encoding="utf-8")


def _builtin_document() -> list[dict]:
    return json.loads(_builtin_document_cached())


_default_catalog: Catalog | None = None


def default_catalog() -> Catalog:
    global _default_catalog
    if _default_catalog is None:
        _default_catalog = Catalog.builtin()
    return _default_catalog


def get_field(fid: str) -> Field:
    """Load a built-in catalog field (cached)."""
    return default_catalog().field(fid)
