from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraholo.exact import (
    Poly,
    Scalar,
    expand_factors,
    factor_low_degree,
    is_irreducible,
    squarefree_decomposition,
)
from strategies import small_scalars

X = Poly.var("x", ("x",))


def _strs(factors):
    return [(str(f), k) for f, k in factors]


def test_difference_of_squares():
    assert _strs(factor_low_degree((X * X - 1) ** 2)) == [("x - 1", 2), ("x + 1", 2)]


def test_complex_quadratic_stays_irreducible():
    assert _strs(factor_low_degree((X * X + 1) ** 2)) == [("x^2 + 1", 2)]
    assert is_irreducible(X * X + 1)


def test_field_relation():
    assert _strs(factor_low_degree(X * X - 2)) == [("x - √2", 1), ("x + √2", 1)]


def test_conjugate_free_roots():
    # roots 3 - √2 and -1 - √2 are not closed under √2 -> -√2
    p = (X - Scalar(3, -1)) * (X + Scalar(1, 1))
    assert _strs(factor_low_degree(p)) == [("x + (-3+√2)", 1), ("x + (1+√2)", 1)]


def test_irrational_quadratic_over_q_sqrt2():
    # x^2 - 3 has roots ±√3, which are not in Q(√2)
    assert is_irreducible(X * X - 3)
    assert not is_irreducible(X * X - 8)


def test_degree_limit():
    with pytest.raises(ValueError):
        factor_low_degree(X ** 7 + 1)


def test_squarefree_decomposition():
    p = (X - 1) * (X + 2) ** 2 * (X * X + 1) ** 3
    parts = squarefree_decomposition(p)
    assert [(k) for _, k in parts] == [1, 2, 3]
    assert parts[2][0] == X * X + 1


@st.composite
def factored(draw):
    """A product of random monic factors of degree 1 and 2, total degree <= 6."""
    factors = []
    deg = 0
    while deg < draw(st.integers(1, 6)):
        d = draw(st.integers(1, 2))
        if deg + d > 6:
            break
        coeffs = [draw(small_scalars) for _ in range(d)] + [Scalar(1)]
        factors.append(Poly.from_coeffs(coeffs))
        deg += d
    return factors


@given(factored())
@settings(max_examples=150)
def test_reexpansion_is_exact(factors):
    p = Poly.const(1, ("x",))
    for f in factors:
        p = p * f
    out = factor_low_degree(p)
    assert expand_factors(out) == p.monic()
    assert all(f.leading_coeff() == 1 for f, _ in out)
    assert sum(f.degree() * k for f, k in out) == p.degree()
    # every linear input factor is recovered exactly
    linear = {f for f, _ in out if f.degree() == 1}
    for f in factors:
        if f.degree() == 1:
            assert f in linear


@given(small_scalars, small_scalars, st.integers(1, 3))
def test_split_quadratics_are_found(r1, r2, k):
    p = ((X - r1) * (X - r2)) ** k
    out = factor_low_degree(p)
    assert all(f.degree() == 1 for f, _ in out)
    assert expand_factors(out) == p
