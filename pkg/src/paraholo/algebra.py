"""Matrix algebras generated by holonomy elements, and irreducibility verdicts.

The verdict is layered:

1. the generated real algebra is all of ``M_n(R)``: irreducible (Burnside);
2. the algebra has a central ``J`` with ``J^2 = -c I`` (``c > 0``) and its
   real dimension is ``2 (n/2)^2``: then ``(R^n, J)`` is a complex space, the
   algebra is the full complex matrix algebra on it, every real invariant
   subspace is ``J``-invariant and hence complex, so irreducible;
3. otherwise look for a proper submodule generated by a candidate vector
   or subspace; any hit is re-verified against every generator;
4. otherwise unknown.

The block group ``[[A, B], [-B, A]]`` is identified with complex matrices by
``phi(F) = A + iB``.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exact import (
    ExactMatrix,
    Poly,
    Scalar,
    eval_poly_at_matrix,
    factor_low_degree,
    is_invariant,
    kernel_basis,
    minimal_polynomial,
    span_basis,
)

FLOAT_RANK_TOL = 1e-9
WITNESS_SEED = 42
_RANDOM_CANDIDATES = 8


class BlockPatternError(ValueError):
    pass


# -- complexification bridge -------------------------------------------------


@dataclass(frozen=True)
class ComplexMatrix:
    """Exact complex matrix ``real + i*imag`` with entries in Q(sqrt 2)(i)."""

    real: ExactMatrix
    imag: ExactMatrix

    def __post_init__(self):
        if self.real.shape != self.imag.shape:
            raise ValueError("real and imaginary parts differ in shape")

    @classmethod
    def identity(cls, n: int) -> ComplexMatrix:
        return cls(ExactMatrix.identity(n), ExactMatrix.zeros(n))

    @property
    def shape(self):
        return self.real.shape

    def __matmul__(self, other: ComplexMatrix) -> ComplexMatrix:
        a, b, c, d = self.real, self.imag, other.real, other.imag
        return ComplexMatrix(a @ c - b @ d, a @ d + b @ c)

    def __add__(self, other: ComplexMatrix) -> ComplexMatrix:
        return ComplexMatrix(self.real + other.real, self.imag + other.imag)

    def __sub__(self, other: ComplexMatrix) -> ComplexMatrix:
        return ComplexMatrix(self.real - other.real, self.imag - other.imag)

    def __neg__(self) -> ComplexMatrix:
        return ComplexMatrix(-self.real, -self.imag)

    def scale(self, re, im=0) -> ComplexMatrix:
        """Multiply by the complex scalar ``re + i*im``."""
        re, im = Scalar.coerce(re), Scalar.coerce(im)
        return ComplexMatrix(self.real * re - self.imag * im, self.real * im + self.imag * re)

    def to_numpy(self) -> np.ndarray:
        return self.real.to_numpy() + 1j * self.imag.to_numpy()

    def __str__(self) -> str:
        rows = []
        for i in range(self.real.nrows):
            cells = []
            for j in range(self.real.ncols):
                cells.append(_complex_str(self.real[i, j], self.imag[i, j]))
            rows.append("[" + ", ".join(cells) + "]")
        return "\n".join(rows)


def _complex_str(re: Scalar, im: Scalar) -> str:
    if not im:
        return str(re)
    mag = abs(im)
    body = "i" if mag == 1 else (f"{mag}i" if mag.is_rational() else f"({mag})i")
    sign = "-" if im.sign() < 0 else ("+" if re else "")
    return (str(re) if re else "") + sign + body


def is_block_F(m: ExactMatrix) -> bool:
    """True iff ``m = [[A, B], [-B, A]]`` with square blocks."""
    n, k = m.nrows, m.ncols
    if n != k or n % 2:
        raise ValueError(f"block pattern needs an even square matrix, got {m.shape}")
    h = n // 2
    for i in range(h):
        for j in range(h):
            if m[i + h, j + h] != m[i, j] or m[i + h, j] != -m[i, j + h]:
                return False
    return True


def phi(f: ExactMatrix) -> ComplexMatrix:
    """``[[A, B], [-B, A]] -> A + iB``."""
    if not is_block_F(f):
        raise BlockPatternError("matrix is not of the form [[A, B], [-B, A]]")
    h = f.nrows // 2
    return ComplexMatrix(f.submatrix(0, h, 0, h), f.submatrix(0, h, h, 2 * h))


def phi_inv(c: ComplexMatrix) -> ExactMatrix:
    a, b = c.real, c.imag
    return ExactMatrix.block([[a, b], [-b, a]])


# -- spans ---------------------------------------------------------------------


class _ExactSpan:
    """Incremental echelon basis for exact vectors."""

    def __init__(self, length: int):
        self.length = length
        self.rows: list[tuple[int, list[Scalar]]] = []

    def _reduce(self, v: Sequence[Scalar]) -> list[Scalar]:
        w = list(v)
        for p, r in self.rows:
            c = w[p]
            if c:
                w = [x - c * y for x, y in zip(w, r)]
        return w

    def contains(self, v) -> bool:
        return not any(self._reduce(v))

    def add(self, v) -> bool:
        w = self._reduce(v)
        p = next((i for i, x in enumerate(w) if x), None)
        if p is None:
            return False
        inv = w[p].inverse()
        self.rows.append((p, [x * inv for x in w]))
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)


class _FloatSpan:
    """Orthonormal basis grown by Gram-Schmidt with a relative rank tolerance."""

    def __init__(self, length: int, tol: float = FLOAT_RANK_TOL):
        self.length = length
        self.tol = tol
        self.q: list[np.ndarray] = []

    def _residual(self, v) -> np.ndarray:
        w = np.asarray(v, dtype=float).copy()
        for _ in range(2):
            for q in self.q:
                w -= (q @ w) * q
        return w

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=float)
        return np.linalg.norm(self._residual(v)) <= self.tol * max(1.0, np.linalg.norm(v))

    def add(self, v) -> bool:
        v = np.asarray(v, dtype=float)
        w = self._residual(v)
        nrm = np.linalg.norm(w)
        if nrm <= self.tol * max(1.0, np.linalg.norm(v)):
            return False
        self.q.append(w / nrm)
        return True

    @property
    def dim(self) -> int:
        return len(self.q)


class _Ops:
    """Arithmetic needed by the generic routines, for exact or float matrices."""

    def __init__(self, exact: bool, n: int):
        self.exact = exact
        self.n = n

    def span(self, length: int):
        return _ExactSpan(length) if self.exact else _FloatSpan(length)

    def identity(self):
        return ExactMatrix.identity(self.n) if self.exact else np.eye(self.n)

    def flat(self, m):
        return m.flatten() if self.exact else np.asarray(m, dtype=float).ravel()

    def unflat(self, v):
        return ExactMatrix.from_flat(list(v), self.n) if self.exact else np.asarray(v).reshape(self.n, self.n)

    def apply(self, m, v):
        return m @ tuple(v) if self.exact else np.asarray(m) @ np.asarray(v, dtype=float)

    def subspace_basis(self, vectors) -> list:
        if self.exact:
            return span_basis(vectors)
        if not vectors:
            return []
        a = np.array(vectors, dtype=float)
        u, s, vt = np.linalg.svd(a)
        r = int((s > FLOAT_RANK_TOL * max(1.0, s[0] if len(s) else 1.0)).sum())
        return [vt[i] for i in range(r)]


def _is_exact_input(generators) -> bool:
    return all(isinstance(g, ExactMatrix) for g in generators)


# -- algebra generation ----------------------------------------------------------


@dataclass(frozen=True)
class MatrixAlgebra:
    """Basis of a real matrix algebra, closed under products (checked on creation)."""

    n: int
    basis: tuple
    unital: bool
    exact: bool
    trace: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        ops = _Ops(self.exact, self.n)
        span = ops.span(self.n * self.n)
        for b in self.basis:
            if not span.add(ops.flat(b)):
                raise ValueError("algebra basis is linearly dependent")
        for a in self.basis:
            for b in self.basis:
                if not span.contains(ops.flat(a @ b)):
                    raise ValueError("basis is not closed under multiplication")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, m) -> bool:
        ops = _Ops(self.exact, self.n)
        span = ops.span(self.n * self.n)
        for b in self.basis:
            span.add(ops.flat(b))
        return span.contains(ops.flat(m))

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "numeric"


def generate_algebra(generators: Sequence, unital: bool = True) -> MatrixAlgebra:
    """Smallest real algebra containing ``generators`` (and ``I`` when unital)."""
    if not generators and not unital:
        raise ValueError("need generators or a unital algebra")
    exact = _is_exact_input(generators)
    gens = list(generators) if exact else [np.asarray(
        g.to_numpy() if isinstance(g, ExactMatrix) else g, dtype=float) for g in generators]
    shapes = {tuple(g.shape) for g in gens}
    if len(shapes) > 1:
        raise ValueError("generators differ in dimension")
    n = gens[0].shape[0] if gens else None
    if n is None:
        raise ValueError("cannot infer dimension without generators")
    if any(s[0] != s[1] for s in shapes):
        raise ValueError("generators must be square")
    ops = _Ops(exact, n)
    span = ops.span(n * n)
    basis = []
    trace = []
    for m in ([ops.identity()] if unital else []) + gens:
        if span.add(ops.flat(m)):
            basis.append(m)
    trace.append(f"span of generators: dim {len(basis)}")
    done = 0
    rnd = 0
    while done < len(basis) and len(basis) < n * n:
        rnd += 1
        start = len(basis)
        for i in range(start):
            for j in range(start):
                if i < done and j < done:
                    continue
                p = basis[i] @ basis[j]
                if span.add(ops.flat(p)):
                    basis.append(p)
        done = start
        trace.append(f"product round {rnd}: dim {len(basis)}")
    return MatrixAlgebra(n, tuple(basis), unital, exact, tuple(trace))


def algebra_center(alg: MatrixAlgebra) -> list:
    """Basis of the center of the algebra."""
    n = alg.n
    if alg.exact:
        cols = []
        for bk in alg.basis:
            col = []
            for bj in alg.basis:
                col.extend((bk @ bj - bj @ bk).flatten())
            cols.append(col)
        sol = kernel_basis(ExactMatrix.from_columns(cols))
        out = []
        for v in sol:
            m = ExactMatrix.zeros(n)
            for c, b in zip(v, alg.basis):
                if c:
                    m = m + b * c
            out.append(m)
        return out
    a = np.array([np.concatenate([(bk @ bj - bj @ bk).ravel() for bj in alg.basis]) for bk in alg.basis]).T
    _, s, vt = np.linalg.svd(a)
    rank = int((s > FLOAT_RANK_TOL * max(1.0, s[0] if len(s) else 1.0)).sum())
    null = vt[rank:]
    return [sum(c * b for c, b in zip(v, alg.basis)) for v in null]


@dataclass(frozen=True)
class ComplexStructure:
    """Central ``J`` with ``J^2 = -c I``; ``c == 1`` when the normalization is exact."""

    matrix: object
    c: object


def find_central_complex_structure(alg: MatrixAlgebra) -> ComplexStructure | None:
    center = algebra_center(alg)
    candidates = list(center) + [a + b for i, a in enumerate(center) for b in center[i + 1:]]
    n = alg.n
    for z in candidates:
        if alg.exact:
            ident = ExactMatrix.identity(n)
            if len(span_basis([z.flatten(), ident.flatten()])) < 2:
                continue
            ker = kernel_basis(ExactMatrix.from_columns([(z @ z).flatten(), z.flatten(), ident.flatten()]))
            if not ker or not ker[0][0]:
                continue
            _, p, q = ker[0]
            c = 4 * q - p * p
            if c.sign() <= 0:
                continue
            j = z * 2 + ident * p
            x = Poly.var("x", ("x",))
            roots = [f for f, _ in factor_low_degree(x * x - c) if f.degree() == 1]
            if roots:
                s = -roots[0].coeffs()[0]
                return ComplexStructure(j * s.inverse(), Scalar(1))
            return ComplexStructure(j, c)
        ident = np.eye(n)
        a = np.stack([z.ravel(), ident.ravel()], axis=1)
        if np.linalg.matrix_rank(a, tol=FLOAT_RANK_TOL) < 2:
            continue
        (p, q), *_ = np.linalg.lstsq(a, -(z @ z).ravel(), rcond=None)
        if np.abs(z @ z + p * z + q * ident).max() > 1e-8 * max(1.0, np.abs(z).max() ** 2):
            continue
        c = 4 * q - p * p
        if c <= 0:
            continue
        j = (2 * z + p * ident) / np.sqrt(c)
        return ComplexStructure(j, 1.0)
    return None


# -- verdicts ------------------------------------------------------------------


class Outcome(str, enum.Enum):
    IRREDUCIBLE = "Irreducible"
    REDUCIBLE = "Reducible"
    UNKNOWN = "Unknown"


class Certificate(str, enum.Enum):
    FULL_ALGEBRA = "FullAlgebra"
    CENTRAL_COMPLEX_STRUCTURE = "CentralComplexStructure"


@dataclass(frozen=True)
class IrreducibilityVerdict:
    outcome: Outcome
    certificate: Certificate | None = None
    witness: list | None = None
    complex_structure: ComplexStructure | None = None
    algebra_dim: int = 0
    mode: str = "exact"
    trace: tuple[str, ...] = ()

    @property
    def irreducible(self) -> bool:
        return self.outcome is Outcome.IRREDUCIBLE

    @property
    def reducible(self) -> bool:
        return self.outcome is Outcome.REDUCIBLE


def _candidate_sets(alg: MatrixAlgebra, generators, ops: _Ops, seed: int):
    n = alg.n
    for i in range(n):
        yield "standard basis", [tuple(Scalar(1) if k == i else Scalar(0) for k in range(n))] if ops.exact \
            else [np.eye(n)[i]]
    for label, m in [("generator", g) for g in generators] + [("algebra element", b) for b in alg.basis]:
        for sub in _spectral_subspaces(m, ops):
            yield f"{label} spectral subspace", sub
            for v in sub:
                yield f"{label} spectral vector", [v]
    rng = random.Random(seed)
    for _ in range(_RANDOM_CANDIDATES):
        v = [rng.randint(-5, 5) for _ in range(n)]
        yield "seeded random vector", [tuple(Scalar(x) for x in v)] if ops.exact else [np.array(v, dtype=float)]


def _spectral_subspaces(m, ops: _Ops) -> list[list]:
    """Kernels of ``q(m)`` for the irreducible factors ``q`` of the minimal polynomial."""
    if ops.exact:
        try:
            factors = factor_low_degree(minimal_polynomial(m))
        except ValueError:
            return []
        return [kernel_basis(eval_poly_at_matrix(q, m)) for q, _ in factors]
    vals, vecs = np.linalg.eig(np.asarray(m, dtype=float))
    out = []
    for k, lam in enumerate(vals):
        v = vecs[:, k]
        if abs(lam.imag) <= 1e-9:
            out.append([np.real(v)])
        elif lam.imag > 0:
            out.append([np.real(v), np.imag(v)])
    return out


def _submodule(alg: MatrixAlgebra, vectors: list, ops: _Ops) -> list:
    images = list(vectors)
    for b in alg.basis:
        images.extend(ops.apply(b, v) for v in vectors)
    return ops.subspace_basis(images)


def _float_invariant(m, basis) -> bool:
    q, _ = np.linalg.qr(np.array(basis, dtype=float).T)
    img = np.asarray(m, dtype=float) @ q
    return np.abs(img - q @ (q.T @ img)).max() <= 1e-7 * max(1.0, np.abs(m).max())


def irreducibility_verdict(generators: Sequence, seed: int = WITNESS_SEED) -> IrreducibilityVerdict:
    """Decide whether the generated group/algebra acts irreducibly on ``R^n``."""
    if not generators:
        raise ValueError("need at least one generator")
    shapes = {tuple(g.shape) for g in generators}
    if len(shapes) != 1:
        raise ValueError("generators differ in dimension")
    alg = generate_algebra(generators, unital=True)
    n = alg.n
    exact = alg.exact
    ops = _Ops(exact, n)
    gens = list(generators) if exact else [np.asarray(
        g.to_numpy() if isinstance(g, ExactMatrix) else g, dtype=float) for g in generators]
    trace = list(alg.trace) + [f"algebra dimension {alg.dim} of {n * n}"]
    common = dict(algebra_dim=alg.dim, mode=alg.mode)

    if alg.dim == n * n:
        trace.append("full matrix algebra: Burnside certificate")
        return IrreducibilityVerdict(Outcome.IRREDUCIBLE, Certificate.FULL_ALGEBRA, trace=tuple(trace), **common)

    cs = find_central_complex_structure(alg)
    if cs is not None:
        trace.append(f"central complex structure found (J^2 = -{cs.c} I)")
        if n % 2 == 0 and alg.dim == 2 * (n // 2) ** 2:
            trace.append(f"complex dimension {alg.dim // 2} = ({n // 2})^2: full complex matrix algebra")
            return IrreducibilityVerdict(Outcome.IRREDUCIBLE, Certificate.CENTRAL_COMPLEX_STRUCTURE,
                                         complex_structure=cs, trace=tuple(trace), **common)
        trace.append(f"complex dimension {alg.dim // 2} < ({n // 2})^2")
    else:
        trace.append("no central complex structure")

    for label, vectors in _candidate_sets(alg, gens, ops, seed):
        if not vectors:
            continue
        w = _submodule(alg, vectors, ops)
        if 0 < len(w) < n:
            ok = all(is_invariant(g, w) for g in gens) if exact else all(_float_invariant(g, w) for g in gens)
            if ok:
                trace.append(f"proper submodule of dimension {len(w)} from {label}")
                return IrreducibilityVerdict(Outcome.REDUCIBLE, witness=w, complex_structure=cs,
                                             trace=tuple(trace), **common)
    trace.append("no certificate and no witness")
    return IrreducibilityVerdict(Outcome.UNKNOWN, complex_structure=cs, trace=tuple(trace), **common)

