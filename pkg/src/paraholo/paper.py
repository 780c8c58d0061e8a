"""The four-dimensional example: two parallel (2,2)-metrics with irreducible holonomy.

Everything here is exact data over Q(sqrt 2) on the chart ``R^4`` with
coordinates ``x1..x4``.
"""

from __future__ import annotations

from .connection import FormMatrix, PolyForm
from .exact import ONE, SQRT2, ZERO, ExactMatrix, Poly, Scalar, coordinate_ring

CHART = coordinate_ring(4)


def k_form() -> ExactMatrix:
    """``diag(1, 1, -1, -1)``."""
    return ExactMatrix.diag(1, 1, -1, -1)


def l_form() -> ExactMatrix:
    """Off-diagonal identity blocks ``[[0, I], [I, 0]]``."""
    z, i = ExactMatrix.zeros(2), ExactMatrix.identity(2)
    return ExactMatrix.block([[z, i], [i, z]])


def g_matrix() -> ExactMatrix:
    r = SQRT2
    return ExactMatrix([
        [r, 0, 0, 1],
        [0, -r, 1, 0],
        [0, -1, r, 0],
        [-1, 0, 0, -r],
    ])


def s_matrix(a, b) -> ExactMatrix:
    """The block element with ``alpha -> a``, ``beta -> b`` in the pattern of theta."""
    a, b = Scalar.coerce(a), Scalar.coerce(b)
    return ExactMatrix([
        [ZERO, a, ZERO, b],
        [-a, ZERO, -b, ZERO],
        [ZERO, -b, ZERO, a],
        [b, ZERO, -a, ZERO],
    ])


def theta_pattern(alpha: PolyForm, beta: PolyForm) -> FormMatrix:
    z = PolyForm.zero(alpha.variables, alpha.degree)
    return FormMatrix([
        [z, alpha, z, beta],
        [-alpha, z, -beta, z],
        [z, -beta, z, alpha],
        [beta, z, -alpha, z],
    ])


def alpha_form() -> PolyForm:
    """``x1 dx4 - x4 dx1``."""
    x1, x4 = Poly.var("x1", CHART), Poly.var("x4", CHART)
    return PolyForm(CHART, 1, {(3,): x1, (0,): -x4})


def beta_form() -> PolyForm:
    """``x2 dx3 - x3 dx2``."""
    x2, x3 = Poly.var("x2", CHART), Poly.var("x3", CHART)
    return PolyForm(CHART, 1, {(2,): x2, (1,): -x3})


def theta() -> FormMatrix:
    return theta_pattern(alpha_form(), beta_form())


def gamma_components() -> list[Poly]:
    """``(1 - 2t, t(t-1), t(t-1), (sqrt2 + 1)(2t - 1))``."""
    t = Poly.var("t", ("t",))
    c = Scalar(1, 1)
    return [1 - 2 * t, t * (t - 1), t * (t - 1), (2 * t - 1) * c]


def forbidden_functionals() -> list[tuple[Scalar, ...]]:
    """Linear functionals cutting out the fixed plane of ``G``.

    ``x3 - (sqrt2 + 1) x2`` and ``x4 - (1 - sqrt2) x1``.
    """
    return [
        (ZERO, -Scalar(1, 1), ONE, ZERO),
        (-Scalar(1, -1), ZERO, ZERO, ONE),
    ]


def line_components() -> list[Poly]:
    """The straight line ``(t, 0, 0, 1)``."""
    t = Poly.var("t", ("t",))
    zero = Poly.zero(("t",))
    return [t, zero, zero, zero + 1]


def complex_structure() -> ExactMatrix:
    """Real form of multiplication by ``i``: blocks ``[[0, I], [-I, 0]]``."""
    z, i = ExactMatrix.zeros(2), ExactMatrix.identity(2)
    return ExactMatrix.block([[z, i], [-i, z]])


def in_stabilizer_h(m: ExactMatrix) -> bool:
    """Membership in the group of linear maps preserving both ``K`` and ``L``."""
    k, l = k_form(), l_form()
    return bool(m.det()) and m.T @ k @ m == k and m.T @ l @ m == l


def generated_h_generators() -> list[ExactMatrix]:
    """``G`` and the infinitesimal rotations ``S(1, 0)``, ``S(0, 1)``.

    The exponentials of the ``S(a, b)`` together with ``G`` generate the group;
    the three matrices generate the same real algebra.
    """
    return [g_matrix(), s_matrix(1, 0), s_matrix(0, 1)]
