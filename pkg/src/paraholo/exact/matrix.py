"""Dense exact matrices over Q(sqrt 2) and the linear algebra built on them."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .poly import Poly
from .scalar import ONE, ZERO, Scalar

Vector = tuple[Scalar, ...]

MAX_CHARPOLY_DIM = 8


class SingularMatrixError(ArithmeticError):
    pass


class ExactMatrix:
    """Immutable dense matrix with :class:`Scalar` entries.

    ``A @ B`` is the matrix product, ``A * c`` scales by a scalar, and
    ``A @ v`` with a tuple ``v`` applies the matrix to a vector.
    """

    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(Scalar.coerce(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise ValueError("matrices must have at least one row and column")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise ValueError("ragged rows")
        self.rows = data
        self._hash = None

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> ExactMatrix:
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int | None = None) -> ExactMatrix:
        c = r if c is None else c
        return cls([[ZERO] * c for _ in range(r)])

    @classmethod
    def diag(cls, *entries) -> ExactMatrix:
        if len(entries) == 1 and isinstance(entries[0], (list, tuple)):
            entries = tuple(entries[0])
        n = len(entries)
        return cls([[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> ExactMatrix:
        return cls(list(zip(*columns)))

    @classmethod
    def from_flat(cls, flat: Sequence, n: int, m: int | None = None) -> ExactMatrix:
        m = n if m is None else m
        return cls([flat[i * m:(i + 1) * m] for i in range(n)])

    @classmethod
    def block(cls, blocks: Sequence[Sequence[ExactMatrix]]) -> ExactMatrix:
        rows = []
        for brow in blocks:
            for i in range(brow[0].nrows):
                rows.append([x for b in brow for x in b.rows[i]])
        return cls(rows)

    # -- shape and access ---------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            i, j = idx
            return self.rows[i][j]
        return self.rows[idx]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def flatten(self) -> Vector:
        return tuple(x for r in self.rows for x in r)

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> ExactMatrix:
        return ExactMatrix([row[c0:c1] for row in self.rows[r0:r1]])

    # -- arithmetic ---------------------------------------------------

    def _check_same_shape(self, other: ExactMatrix):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> ExactMatrix:
        return ExactMatrix([[-a for a in r] for r in self.rows])

    def __mul__(self, c):
        if isinstance(c, ExactMatrix):
            raise TypeError("use @ for matrix products")
        try:
            s = Scalar.coerce(c)
        except TypeError:
            return NotImplemented
        return ExactMatrix([[a * s for a in r] for r in self.rows])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.columns()
            return ExactMatrix([[_dot(r, c) for c in cols] for r in self.rows])
        if isinstance(other, (tuple, list)):
            if len(other) != self.ncols:
                raise ValueError("vector length does not match matrix")
            v = tuple(Scalar.coerce(x) for x in other)
            return tuple(_dot(r, v) for r in self.rows)
        return NotImplemented

    def __pow__(self, k: int) -> ExactMatrix:
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        if k < 0:
            return mat_inverse(self) ** (-k)
        result, base = ExactMatrix.identity(self.nrows), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    @property
    def T(self) -> ExactMatrix:
        return ExactMatrix(list(zip(*self.rows)))

    def transpose(self) -> ExactMatrix:
        return self.T

    def trace(self) -> Scalar:
        if not self.is_square():
            raise ValueError("trace of a non-square matrix")
        total = ZERO
        for i in range(self.nrows):
            total = total + self.rows[i][i]
        return total

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def is_symmetric(self) -> bool:
        return self.is_square() and self == self.T

    def conjugate(self) -> ExactMatrix:
        return ExactMatrix([[x.conjugate() for x in r] for r in self.rows])

    # -- comparison, conversion ---------------------------------------

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows], dtype=float)

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.rows]

    def __str__(self) -> str:
        cells = self.to_strings()
        w = max(len(c) for r in cells for c in r)
        return "\n".join("[" + " ".join(c.rjust(w) for c in r) + "]" for r in cells)

    def __repr__(self) -> str:
        return f"ExactMatrix({self.to_strings()!r})"

    # -- elimination-based routines -----------------------------------

    def rref(self) -> tuple[ExactMatrix, list[int]]:
        """Reduced row echelon form and pivot column indices."""
        rows, pivots = _rref_rows([list(r) for r in self.rows], self.ncols)
        return ExactMatrix(rows), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def det(self) -> Scalar:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        a = [list(r) for r in self.rows]
        n = len(a)
        det = ONE
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col]), None)
            if piv is None:
                return ZERO
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                det = -det
            p = a[col][col]
            det = det * p
            inv = p.inverse()
            for r in range(col + 1, n):
                f = a[r][col]
                if f:
                    f = f * inv
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return det


def _dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    total = ZERO
    for a, b in zip(u, v):
        if a and b:
            total = total + a * b
    return total


def _rref_rows(a: list[list[Scalar]], ncols: int) -> tuple[list[list[Scalar]], list[int]]:
    pivots: list[int] = []
    r = 0
    nrows = len(a)
    for c in range(ncols):
        if r >= nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c].inverse()
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


# -- vector-space helpers ----------------------------------------------


def span_basis(vectors: Sequence[Sequence]) -> list[Vector]:
    """Canonical basis of the span: nonzero rows of the RREF.

    Every returned vector has first nonzero coordinate 1, and equal spans
    give identical bases.
    """
    vecs = [tuple(Scalar.coerce(x) for x in v) for v in vectors]
    if not vecs:
        return []
    rows, pivots = _rref_rows([list(v) for v in vecs], len(vecs[0]))
    return [tuple(rows[i]) for i in range(len(pivots))]


def in_span(basis: Sequence[Sequence], v: Sequence) -> bool:
    if not basis:
        return all(not Scalar.coerce(x) for x in v)
    return len(span_basis(list(basis) + [v])) == len(span_basis(basis))


def subspace_contains(big: Sequence[Sequence], small: Sequence[Sequence]) -> bool:
    return all(in_span(big, v) for v in small)


def subspace_intersection(u: Sequence[Sequence], w: Sequence[Sequence]) -> list[Vector]:
    """Canonical basis of ``span(u) ∩ span(w)``."""
    if not u or not w:
        return []
    # solve sum a_i u_i = sum b_j w_j
    n = len(u[0])
    cols = [tuple(Scalar.coerce(x) for x in v) for v in u] + [
        tuple(-Scalar.coerce(x) for x in v) for v in w
    ]
    m = ExactMatrix.from_columns(cols) if cols else ExactMatrix.zeros(n, 1)
    out = []
    for coeffs in kernel_basis(m):
        vec = [ZERO] * n
        for a, v in zip(coeffs[: len(u)], u):
            if a:
                vec = [x + a * Scalar.coerce(y) for x, y in zip(vec, v)]
        out.append(tuple(vec))
    return span_basis(out)


def subspace_sum(u: Sequence[Sequence], w: Sequence[Sequence]) -> list[Vector]:
    return span_basis(list(u) + list(w))


def is_invariant(m: ExactMatrix, basis: Sequence[Sequence]) -> bool:
    """True iff ``m`` maps ``span(basis)`` into itself."""
    return all(in_span(basis, m @ tuple(v)) for v in basis)


# -- the public operations ---------------------------------------------


def kernel_basis(m: ExactMatrix) -> list[Vector]:
    """Exact null-space basis in canonical (RREF) form."""
    r, pivots = m.rref()
    n = m.ncols
    free = [c for c in range(n) if c not in pivots]
    raw = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -r[i, f]
        raw.append(v)
    return span_basis(raw)


def mat_inverse(m: ExactMatrix) -> ExactMatrix:
    if not m.is_square():
        raise ValueError("inverse of a non-square matrix")
    n = m.nrows
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(m.rows)]
    rows, pivots = _rref_rows(aug, n)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return ExactMatrix([r[n:] for r in rows])


def char_poly(m: ExactMatrix, var: str = "x") -> Poly:
    """Characteristic polynomial ``det(x I - M)`` via Faddeev-LeVerrier."""
    if not m.is_square():
        raise ValueError("characteristic polynomial of a non-square matrix")
    n = m.nrows
    if n > MAX_CHARPOLY_DIM:
        raise ValueError(f"dimension {n} exceeds supported envelope {MAX_CHARPOLY_DIM}")
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    ident = ExactMatrix.identity(n)
    mk = ExactMatrix.zeros(n)
    for k in range(1, n + 1):
        mk = m @ mk + ident * coeffs[n - k + 1]
        coeffs[n - k] = -(m @ mk).trace() / k
    return Poly.from_coeffs(coeffs, var)


def eval_poly_at_matrix(p: Poly, m: ExactMatrix) -> ExactMatrix:
    """Horner evaluation of a univariate polynomial at a square matrix."""
    n = m.nrows
    result = ExactMatrix.zeros(n)
    ident = ExactMatrix.identity(n)
    for c in reversed(p.coeffs()):
        result = result @ m + ident * c
    return result


def minimal_polynomial(m: ExactMatrix, var: str = "x") -> Poly:
    """Monic minimal polynomial, found as the first linear dependency among powers."""
    n = m.nrows
    powers = [ExactMatrix.identity(n)]
    while True:
        nxt = powers[-1] @ m
        k = len(powers)
        # solve sum c_i M^i = -M^k
        cols = [p.flatten() for p in powers]
        a = ExactMatrix.from_columns(cols + [nxt.flatten()])
        ker = kernel_basis(a)
        if ker:
            v = ker[-1]
            # the kernel is one-dimensional because lower powers are independent
            lead = v[k]
            coeffs = [x / lead for x in v]
            return Poly.from_coeffs(coeffs, var)
        powers.append(nxt)
