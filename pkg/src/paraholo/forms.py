"""Constant semi-Riemannian metrics and the pencil reduction engine.

For two nondegenerate symmetric forms ``g1, g2`` the pencil operator
``A = g1^{-1} g2`` is self-adjoint for ``g1`` and commutes with every
linear map preserving both forms. Its generalized eigenspaces, and every
level ``ker q(A)^j`` of their filtrations, are therefore invariant under the
whole group of simultaneous isometries, and in particular under any
holonomy group that keeps both metrics parallel.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .exact import (
    ExactMatrix,
    Poly,
    Scalar,
    eval_poly_at_matrix,
    factor_low_degree,
    kernel_basis,
    mat_inverse,
    minimal_polynomial,
    span_basis,
    subspace_intersection,
    subspace_sum,
)
from .exact.matrix import Vector


class DegenerateFormError(ValueError):
    pass


class NotIndependentError(ValueError):
    pass


class ProportionalFormsError(NotIndependentError):
    """The second form is a scalar multiple of the first."""


def signature(c: ExactMatrix) -> tuple[int, int]:
    """Sylvester signature ``(p, q)`` by exact congruence diagonalization."""
    if not c.is_symmetric():
        raise ValueError("signature needs a symmetric matrix")
    a = [list(r) for r in c.rows]
    n = len(a)
    p = q = 0

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        for row in a:
            row[i], row[j] = row[j], row[i]

    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j]), None)
            if pair is None:
                raise DegenerateFormError(f"form is degenerate (rank {k} < {n})")
            i, j = pair
            # e_i -> e_i + e_j gives a nonzero diagonal entry 2 a_ij
            a[i] = [x + y for x, y in zip(a[i], a[j])]
            for row in a:
                row[i] = row[i] + row[j]
            piv = i
        if piv != k:
            swap(piv, k)
        d = a[k][k]
        if d.sign() > 0:
            p += 1
        else:
            q += 1
        inv = d.inverse()
        for r in range(k + 1, n):
            f = a[r][k]
            if f:
                f = f * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[k])]
                for row in a:
                    row[r] = row[r] - f * row[k]
    return p, q


@dataclass(frozen=True)
class BilinearForm:
    """A constant nondegenerate symmetric form with its cached signature."""

    matrix: ExactMatrix
    name: str = ""
    signature: tuple[int, int] = field(init=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.matrix, ExactMatrix):
            object.__setattr__(self, "matrix", ExactMatrix(self.matrix))
        object.__setattr__(self, "signature", signature(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.nrows

    def is_split(self) -> bool:
        p, q = self.signature
        return p == q

    def __call__(self, u: Sequence, v: Sequence) -> Scalar:
        w = self.matrix @ tuple(v)
        total = Scalar(0)
        for a, b in zip(u, w):
            total = total + Scalar.coerce(a) * b
        return total


def _as_form(g) -> BilinearForm:
    return g if isinstance(g, BilinearForm) else BilinearForm(g)


def are_independent(forms: Sequence) -> bool:
    """Linear independence of the form matrices as vectors of length n^2."""
    if not forms:
        raise ValueError("need at least one form")
    mats = [_as_form(g).matrix if not isinstance(g, ExactMatrix) else g for g in forms]
    if len({m.shape for m in mats}) != 1:
        raise ValueError("forms have different dimensions")
    return len(span_basis([m.flatten() for m in mats])) == len(mats)


def preserves_form(h: ExactMatrix, c) -> bool:
    """True iff ``h^T C h == C`` exactly."""
    cm = c.matrix if isinstance(c, BilinearForm) else c
    if h.shape != cm.shape:
        raise ValueError("dimension mismatch")
    return h.T @ cm @ h == cm


def joint_isometry_algebra(forms: Sequence) -> list[ExactMatrix]:
    """Basis of ``{X : X^T g + g X = 0 for every form g}``."""
    mats = [_as_form(g).matrix for g in forms]
    n = mats[0].nrows
    rows = []
    for g in mats:
        for i in range(n):
            for j in range(n):
                # (X^T g + g X)_{ij} = sum_k X_{ki} g_{kj} + g_{ik} X_{kj}
                row = [Scalar(0)] * (n * n)
                for k in range(n):
                    row[k * n + i] = row[k * n + i] + g[k, j]
                    row[k * n + j] = row[k * n + j] + g[i, k]
                rows.append(row)
    sol = kernel_basis(ExactMatrix(rows))
    return [ExactMatrix.from_flat(v, n) for v in sol]


class Verdict(str, enum.Enum):
    SUBSPACES_FOUND = "SubspacesFound"
    COMPLEX_STRUCTURE_TYPE = "ComplexStructureType"
    # single irreducible factor that is not a complex-conjugate quadratic:
    # real invariant subspaces exist but are not defined over Q(sqrt 2)
    NO_RATIONAL_SPLITTING = "NoRationalSplitting"
    PROPORTIONAL = "Proportional"


@dataclass(frozen=True)
class PencilComponent:
    factor: Poly
    multiplicity: int
    generalized_eigenspace: list[Vector]
    levels: list[list[Vector]]  # levels[j-1] = ker factor(A)^j


@dataclass(frozen=True)
class PencilReport:
    operator: ExactMatrix
    minimal_polynomial: Poly
    components: list[PencilComponent]
    subspaces: list[list[Vector]]
    verdict: Verdict
    operators: tuple[ExactMatrix, ...] = ()

    @property
    def found_subspace(self) -> bool:
        return self.verdict is Verdict.SUBSPACES_FOUND


def _subspace_key(basis: list[Vector]):
    return (len(basis), tuple(tuple((float(x), x.a, x.b) for x in v) for v in basis))


def _proper(basis: list[Vector], n: int) -> bool:
    return 0 < len(basis) < n


def _has_complex_roots(q: Poly) -> bool:
    if q.degree() != 2:
        return False
    c0, c1, c2 = q.coeffs()
    return (c1 * c1 - 4 * c0 * c2).sign() < 0


def pencil_reduce(g1, g2) -> PencilReport:
    """Invariant subspaces of every simultaneous isometry of ``g1`` and ``g2``.

    Raises :class:`ProportionalFormsError` if ``g2 = λ g1``.
    """
    g1, g2 = _as_form(g1), _as_form(g2)
    if g1.dim != g2.dim:
        raise ValueError("forms have different dimensions")
    n = g1.dim
    a = mat_inverse(g1.matrix) @ g2.matrix
    mp = minimal_polynomial(a)
    if mp.degree() == 1:
        raise ProportionalFormsError(f"second form is {-mp.coeffs()[0]} times the first")
    components = []
    found: dict[tuple, list[Vector]] = {}
    for q, k in factor_low_degree(mp):
        qa = eval_poly_at_matrix(q, a)
        levels = []
        power = qa
        for _ in range(k):
            levels.append(kernel_basis(power))
            power = power @ qa
        components.append(PencilComponent(q, k, levels[-1], levels))
        for lev in levels:
            if _proper(lev, n):
                found[tuple(lev)] = lev
    subspaces = sorted(found.values(), key=_subspace_key)
    if subspaces:
        verdict = Verdict.SUBSPACES_FOUND
    elif len(components) == 1 and _has_complex_roots(components[0].factor):
        verdict = Verdict.COMPLEX_STRUCTURE_TYPE
        if not (g1.is_split() and g2.is_split()):
            raise AssertionError("complex-type pencil on forms of unsplit signature")
    else:
        verdict = Verdict.NO_RATIONAL_SPLITTING
    return PencilReport(a, mp, components, subspaces, verdict, (a,))


def _lattice_closure(subspaces: list[list[Vector]], n: int, max_rounds: int = 8) -> list[list[Vector]]:
    known = {tuple(s): s for s in subspaces}
    for _ in range(max_rounds):
        new = {}
        items = list(known.values())
        for u, w in combinations(items, 2):
            for cand in (subspace_intersection(u, w), subspace_sum(u, w)):
                if _proper(cand, n) and tuple(cand) not in known:
                    new[tuple(cand)] = cand
        if not new:
            break
        known.update(new)
    return sorted(known.values(), key=_subspace_key)


def multi_pencil_reduce(forms: Sequence) -> PencilReport:
    """Pencil reduction for several forms against the first one.

    Subspaces from each pencil ``(g1, gj)`` are combined by intersections and
    sums; all of them are invariant under any map preserving every form.
    """
    if len(forms) < 2:
        raise ValueError("need at least two forms")
    fs = [_as_form(g) for g in forms]
    if not are_independent(fs):
        raise NotIndependentError("forms are not linearly independent")
    n = fs[0].dim
    reports = [pencil_reduce(fs[0], g) for g in fs[1:]]
    if len(reports) == 1:
        return reports[0]
    pooled = [s for r in reports for s in r.subspaces]
    subspaces = _lattice_closure(pooled, n) if pooled else []
    if subspaces:
        verdict = Verdict.SUBSPACES_FOUND
    elif all(r.verdict is Verdict.COMPLEX_STRUCTURE_TYPE for r in reports):
        verdict = Verdict.COMPLEX_STRUCTURE_TYPE
    else:
        verdict = Verdict.NO_RATIONAL_SPLITTING
    components = [c for r in reports for c in r.components]
    first = reports[0]
    return PencilReport(
        first.operator,
        first.minimal_polynomial,
        components,
        subspaces,
        verdict,
        tuple(r.operator for r in reports),
    )
