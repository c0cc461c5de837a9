"""Scalar fields, second-order jets and sparse multivariate polynomials."""

from .scalar import Field, Mode, format_scalar, parse_scalar, to_float
from .jet import Jet2, jet_arith
from .poly import MultiPoly, poly_diff, poly_eval, poly_ring

__all__ = [
    "Field", "Mode", "format_scalar", "parse_scalar", "to_float",
    "Jet2", "jet_arith",
    "MultiPoly", "poly_diff", "poly_eval", "poly_ring",
]
