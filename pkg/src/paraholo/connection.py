"""Polynomial differential forms on a single chart and connection 1-form matrices.

Sign convention: a matrix of 1-forms ``theta`` defines the connection with

    nabla_{X_i} dx^j = - sum_l theta^j_l(X_i) dx^l,      X_i = d/dx^i,

so a frame ``f`` is parallel along a curve ``gamma`` when
``f' + theta(gamma') f = 0``, and a constant metric ``C`` is parallel when
``theta^T C + C theta = 0``. The curvature is ``Omega = d theta + theta ∧ theta``.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .exact import ExactMatrix, Poly, Scalar, SingularMatrixError, mat_inverse
from .forms import BilinearForm

def _sort_sign(idx: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and sorted order of a wedge monomial; None if an index repeats."""
    if len(set(idx)) != len(idx):
        return None
    sign = 1
    arr = list(idx)
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


class PolyForm:
    """A differential form with polynomial coefficients.

    Components are keyed by increasing index tuples (0-based): ``()`` for a
    function, ``(k,)`` for ``dx^{k+1}``, ``(k, l)`` with ``k < l`` for
    ``dx^{k+1} ∧ dx^{l+1}``, and so on. Zero components are dropped; forms of
    degree above the chart dimension are always zero.
    """

    __slots__ = ("variables", "degree", "_comps")

    def __init__(self, variables: Sequence[str], degree: int, comps: Mapping[tuple[int, ...], Poly] | None = None):
        if degree < 0:
            raise ValueError(f"form degree {degree} unsupported")
        self.variables = tuple(variables)
        self.degree = degree
        n = len(self.variables)
        clean: dict[tuple[int, ...], Poly] = {}
        for key, coeff in (comps or {}).items():
            key = tuple(key)
            if len(key) != degree or any(not 0 <= k < n for k in key):
                raise ValueError(f"bad component index {key} for a {degree}-form in {n} variables")
            if not isinstance(coeff, Poly):
                coeff = Poly.const(coeff, self.variables)
            elif coeff.variables != self.variables:
                raise ValueError("coefficient variables do not match the chart")
            ss = _sort_sign(key)
            if ss is None:
                continue
            sign, skey = ss
            val = clean.get(skey, Poly.zero(self.variables)) + coeff * sign
            if val.is_zero():
                clean.pop(skey, None)
            else:
                clean[skey] = val
        self._comps = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str], degree: int) -> PolyForm:
        return cls(variables, degree)

    @classmethod
    def function(cls, f: Poly) -> PolyForm:
        return cls(f.variables, 0, {(): f})

    @classmethod
    def dx(cls, k: int, variables: Sequence[str]) -> PolyForm:
        """The basic 1-form ``dx^{k}`` with 1-based index ``k``."""
        return cls(variables, 1, {(k - 1,): Poly.const(1, variables)})

    @classmethod
    def one_form(cls, coeffs: Sequence[Poly | int]) -> PolyForm:
        """``sum_k coeffs[k] dx^{k+1}``."""
        polys = [c for c in coeffs if isinstance(c, Poly)]
        if not polys:
            raise ValueError("need at least one polynomial coefficient to fix variables")
        variables = polys[0].variables
        return cls(variables, 1, {(k,): c for k, c in enumerate(coeffs)})

    # -- access -------------------------------------------------------

    @property
    def components(self) -> dict[tuple[int, ...], Poly]:
        return dict(self._comps)

    @property
    def dim(self) -> int:
        return len(self.variables)

    def coefficient(self, *idx: int) -> Poly:
        """Coefficient for 0-based indices, respecting antisymmetry."""
        ss = _sort_sign(tuple(idx))
        if ss is None:
            return Poly.zero(self.variables)
        sign, key = ss
        return self._comps.get(key, Poly.zero(self.variables)) * sign

    def is_zero(self) -> bool:
        return not self._comps

    def has_constant_coefficients(self) -> bool:
        return all(c.is_constant() for c in self._comps.values())

    # -- algebra ------------------------------------------------------

    def _check(self, other: PolyForm):
        if other.variables != self.variables or other.degree != self.degree:
            raise ValueError("forms differ in chart or degree")

    def __add__(self, other: PolyForm) -> PolyForm:
        if not isinstance(other, PolyForm):
            return NotImplemented
        self._check(other)
        comps = dict(self._comps)
        for k, c in other._comps.items():
            comps[k] = comps.get(k, Poly.zero(self.variables)) + c
        return PolyForm(self.variables, self.degree, comps)

    def __neg__(self) -> PolyForm:
        return PolyForm(self.variables, self.degree, {k: -c for k, c in self._comps.items()})

    def __sub__(self, other: PolyForm) -> PolyForm:
        return self + (-other)

    def __mul__(self, f) -> PolyForm:
        """Multiply by a scalar or a polynomial function."""
        if isinstance(f, PolyForm):
            return NotImplemented
        return PolyForm(self.variables, self.degree, {k: c * f for k, c in self._comps.items()})

    __rmul__ = __mul__

    def wedge(self, other: PolyForm) -> PolyForm:
        if other.variables != self.variables:
            raise ValueError("forms live on different charts")
        deg = self.degree + other.degree
        comps: dict[tuple[int, ...], Poly] = {}
        for k1, c1 in self._comps.items():
            for k2, c2 in other._comps.items():
                ss = _sort_sign(k1 + k2)
                if ss is None:
                    continue
                sign, skey = ss
                comps[skey] = comps.get(skey, Poly.zero(self.variables)) + c1 * c2 * sign
        return PolyForm(self.variables, deg, comps)

    def __xor__(self, other: PolyForm) -> PolyForm:
        return self.wedge(other)

    def d(self) -> PolyForm:
        """Exterior derivative."""
        comps: dict[tuple[int, ...], Poly] = {}
        for key, c in self._comps.items():
            for m in range(self.dim):
                dc = c.diff(m)
                if dc.is_zero():
                    continue
                ss = _sort_sign((m,) + key)
                if ss is None:
                    continue
                sign, skey = ss
                comps[skey] = comps.get(skey, Poly.zero(self.variables)) + dc * sign
        return PolyForm(self.variables, self.degree + 1, comps)

    def pullback(self, a: ExactMatrix) -> PolyForm:
        """Pullback along the linear map ``x -> a x`` of the chart."""
        n = self.dim
        if a.shape != (n, n):
            raise ValueError("pullback matrix has the wrong shape")
        coords = [Poly.var(v, self.variables) for v in self.variables]
        images = [sum((coords[m] * a[i, m] for m in range(n)), Poly.zero(self.variables)) for i in range(n)]
        dimages = [PolyForm(self.variables, 1, {(m,): Poly.const(a[k, m], self.variables) for m in range(n)})
                   for k in range(n)]
        out = PolyForm.zero(self.variables, self.degree)
        for key, c in self._comps.items():
            term = PolyForm.function(c.compose(images))
            for k in key:
                term = term.wedge(dimages[k])
            out = out + term
        return out

    def evaluate(self, point: Sequence, *indices: int) -> Scalar:
        """Value of the component on coordinate vector fields at ``point`` (0-based indices)."""
        return self.coefficient(*indices).evaluate(point)

    # -- comparison, display -----------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        return (self.variables, self.degree, self._comps) == (other.variables, other.degree, other._comps)

    def __hash__(self):
        return hash((self.variables, self.degree, frozenset(self._comps.items())))

    def __str__(self) -> str:
        if not self._comps:
            return "0"
        parts = []
        for key in sorted(self._comps):
            c = self._comps[key]
            basis = "∧".join(f"d{self.variables[k]}" for k in key)
            cs = str(c)
            if not basis:
                parts.append(cs)
            elif cs == "1":
                parts.append(basis)
            elif cs == "-1":
                parts.append(f"-{basis}")
            elif c.is_constant() and "(" not in cs:
                parts.append(f"{cs} {basis}")
            else:
                parts.append(f"({cs}) {basis}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"PolyForm(deg={self.degree}, {str(self)!r})"


class FormMatrix:
    """Square matrix of forms of one common degree."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[Iterable[PolyForm]]):
        grid = tuple(tuple(r) for r in entries)
        n = len(grid)
        if n == 0 or any(len(r) != n for r in grid):
            raise ValueError("form matrix must be square and nonempty")
        degs = {f.degree for r in grid for f in r}
        if len(degs) != 1:
            raise ValueError("form matrix entries must share one degree")
        charts = {f.variables for r in grid for f in r}
        if len(charts) != 1:
            raise ValueError("form matrix entries must share one chart")
        if len(next(iter(charts))) != n:
            raise ValueError("form matrix dimension must match chart dimension")
        self.entries = grid

    @classmethod
    def zero(cls, variables: Sequence[str], degree: int = 1) -> FormMatrix:
        n = len(variables)
        return cls([[PolyForm.zero(variables, degree) for _ in range(n)] for _ in range(n)])

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def degree(self) -> int:
        return self.entries[0][0].degree

    @property
    def variables(self) -> tuple[str, ...]:
        return self.entries[0][0].variables

    def __getitem__(self, idx) -> PolyForm:
        i, j = idx
        return self.entries[i][j]

    def _map(self, fn) -> FormMatrix:
        return FormMatrix([[fn(f) for f in r] for r in self.entries])

    def __add__(self, other: FormMatrix) -> FormMatrix:
        if not isinstance(other, FormMatrix):
            return NotImplemented
        return FormMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self) -> FormMatrix:
        return self._map(lambda f: -f)

    def __sub__(self, other: FormMatrix) -> FormMatrix:
        return self + (-other)

    def __mul__(self, c) -> FormMatrix:
        return self._map(lambda f: f * c)

    __rmul__ = __mul__

    @property
    def T(self) -> FormMatrix:
        return FormMatrix(list(zip(*self.entries)))

    def __matmul__(self, m: ExactMatrix) -> FormMatrix:
        if not isinstance(m, ExactMatrix):
            return NotImplemented
        if m.shape != (self.n, self.n):
            raise ValueError("dimension mismatch")
        zero = PolyForm.zero(self.variables, self.degree)
        out = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                acc = zero
                for k in range(self.n):
                    if m[k, j]:
                        acc = acc + self.entries[i][k] * m[k, j]
                row.append(acc)
            out.append(row)
        return FormMatrix(out)

    def __rmatmul__(self, m: ExactMatrix) -> FormMatrix:
        if not isinstance(m, ExactMatrix):
            return NotImplemented
        if m.shape != (self.n, self.n):
            raise ValueError("dimension mismatch")
        zero = PolyForm.zero(self.variables, self.degree)
        out = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                acc = zero
                for k in range(self.n):
                    if m[i, k]:
                        acc = acc + self.entries[k][j] * m[i, k]
                row.append(acc)
            out.append(row)
        return FormMatrix(out)

    def is_zero(self) -> bool:
        return all(f.is_zero() for r in self.entries for f in r)

    def has_constant_coefficients(self) -> bool:
        return all(f.has_constant_coefficients() for r in self.entries for f in r)

    def evaluate_on(self, point: Sequence, *indices: int) -> ExactMatrix:
        """The endomorphism obtained by evaluating every entry on coordinate fields at ``point``."""
        return ExactMatrix([[f.evaluate(point, *indices) for f in r] for r in self.entries])

    def __eq__(self, other):
        if not isinstance(other, FormMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __str__(self) -> str:
        return "\n".join("[" + " | ".join(str(f) for f in r) + "]" for r in self.entries)

    def __repr__(self) -> str:
        return f"FormMatrix(n={self.n}, degree={self.degree})"


# -- operations ----------------------------------------------------------


def exterior_d(f):
    """Exterior derivative of a form, applied entrywise to a form matrix."""
    if isinstance(f, FormMatrix):
        return f._map(lambda e: e.d())
    return f.d()


def wedge(a: FormMatrix, b: FormMatrix) -> FormMatrix:
    """``(a ∧ b)^i_j = sum_k a^i_k ∧ b^k_j``."""
    if a.n != b.n:
        raise ValueError("dimension mismatch in wedge")
    n = a.n
    deg = a.degree + b.degree
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = PolyForm.zero(a.variables, deg)
            for k in range(n):
                acc = acc + a[i, k].wedge(b[k, j])
            row.append(acc)
        out.append(row)
    return FormMatrix(out)


def curvature(theta: FormMatrix) -> FormMatrix:
    if theta.degree != 1:
        raise ValueError("curvature needs a matrix of 1-forms")
    return exterior_d(theta) + wedge(theta, theta)


def parallel_defect(theta: FormMatrix, c) -> FormMatrix:
    """``theta^T C + C theta``; zero iff the constant metric ``C`` is parallel."""
    cm = c.matrix if isinstance(c, BilinearForm) else c
    return theta.T @ cm + cm @ theta


def is_parallel(theta: FormMatrix, c) -> bool:
    return parallel_defect(theta, c).is_zero()


def _require_invertible(a: ExactMatrix):
    if not a.is_square() or not a.det():
        raise SingularMatrixError("linear map must be invertible")


def linear_pullback(a: ExactMatrix, f):
    """Pullback of a form or form matrix along ``x -> a x``."""
    _require_invertible(a)
    if isinstance(f, FormMatrix):
        return f._map(lambda e: e.pullback(a))
    return f.pullback(a)


def connection_invariant_under(a: ExactMatrix, theta: FormMatrix) -> bool:
    """Whether the linear map ``x -> a x`` is an affine transformation of the connection.

    In the coordinate frame this is the identity ``L_a^* theta = a theta a^{-1}``.
    """
    _require_invertible(a)
    return linear_pullback(a, theta) == a @ theta @ mat_inverse(a)
