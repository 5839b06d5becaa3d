"""Exact traces of Hecke and Frobenius operators via weighted point counts."""

from hecketrace.ffield import (
    BudgetError,
    DEFAULT_MAX_FIELD_SIZE,
    FqElem,
    FqField,
    FqPoly,
    PrimePower,
    embed,
    fq_construct,
    poly_divides_mod,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "DEFAULT_MAX_FIELD_SIZE",
    "FqElem",
    "FqField",
    "FqPoly",
    "PrimePower",
    "embed",
    "fq_construct",
    "poly_divides_mod",
    "__version__",
]
