"""Exact-arithmetic toolkit deciding obstructions to universal classical
ternary quadratic forms over totally real number fields."""

__version__ = "0.1.0"

from .field import (  # noqa: F401
    Catalog,
    Elem,
    ElemQ,
    Field,
    FieldSpec,
    contains_sqrt,
    default_catalog,
    format_elem,
    get_field,
    load_field,
    parse_elem,
    sqrt_exact,
    two_is_ramified,
)
