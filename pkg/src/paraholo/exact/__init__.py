"""Exact arithmetic over Q(sqrt 2): scalars, polynomials, matrices, factoring."""

from .factor import expand_factors, factor_low_degree, is_irreducible, squarefree_decomposition
from .matrix import (
    ExactMatrix,
    SingularMatrixError,
    char_poly,
    eval_poly_at_matrix,
    in_span,
    is_invariant,
    kernel_basis,
    mat_inverse,
    minimal_polynomial,
    span_basis,
    subspace_contains,
    subspace_intersection,
    subspace_sum,
)
from .poly import Poly, coordinate_ring, coordinates, poly_gcd
from .scalar import ONE, SQRT2, ZERO, Scalar, as_scalar

__all__ = [
    "ExactMatrix", "ONE", "Poly", "SQRT2", "Scalar", "SingularMatrixError", "ZERO",
    "as_scalar", "char_poly", "coordinate_ring", "coordinates", "eval_poly_at_matrix",
    "expand_factors", "factor_low_degree", "in_span", "is_invariant", "is_irreducible",
    "kernel_basis", "mat_inverse", "minimal_polynomial", "poly_gcd", "span_basis",
    "squarefree_decomposition", "subspace_contains", "subspace_intersection", "subspace_sum",
]
