"""Exact arithmetic over QQ(x1, ..., xn)."""

from .poly import MultiPoly, NotDivisible, VariableMismatch, to_qq
from .ratfunc import (
    DerivationTable,
    NoCommutationFactor,
    RatField,
    RatFunc,
    SubstEndo,
    commutation_factor,
    rf_derive,
    rf_equals,
    rf_substitute,
)
from .parse import ParseError, parse_poly, parse_ratfunc
from .linalg import (
    SingularMatrix,
    det,
    identity,
    linear_solve,
    mat_add,
    mat_equal,
    mat_inverse,
    mat_mul,
    mat_sub,
    zeros,
)

__all__ = [
    "MultiPoly", "NotDivisible", "VariableMismatch", "to_qq",
    "DerivationTable", "NoCommutationFactor", "RatField", "RatFunc", "SubstEndo",
    "commutation_factor", "rf_derive", "rf_equals", "rf_substitute",
    "ParseError", "parse_poly", "parse_ratfunc",
    "SingularMatrix", "det", "identity", "linear_solve", "mat_add", "mat_equal",
    "mat_inverse", "mat_mul", "mat_sub", "zeros",
]
