"""Sparse multivariate polynomials with coefficients in Q(sqrt 2).

Terms are kept in a dict keyed by exponent tuples. Zero coefficients are
never stored, so two polynomials over the same variables are equal exactly
when their term dicts are equal. Iteration and printing use graded
lexicographic order (highest total degree first).
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .scalar import ONE, ZERO, Scalar


def _grlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


class Poly:
    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], object] | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: dict[tuple[int, ...], Scalar] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise ValueError(f"exponent {exps} does not match {n} variables")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponents are not polynomials")
            c = Scalar.coerce(c)
            if c:
                clean[exps] = clean.get(exps, ZERO) + c
                if not clean[exps]:
                    del clean[exps]
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> Poly:
        return cls(variables)

    @classmethod
    def const(cls, c, variables: Sequence[str]) -> Poly:
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> Poly:
        variables = tuple(variables)
        i = variables.index(name)
        exps = tuple(1 if k == i else 0 for k in range(len(variables)))
        return cls(variables, {exps: ONE})

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, var: str = "x") -> Poly:
        """Univariate polynomial from coefficients listed lowest degree first."""
        return cls((var,), {(k,): c for k, c in enumerate(coeffs)})

    # -- access -------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], Scalar]:
        return dict(self._terms)

    def items(self):
        """Terms in graded lexicographic order, leading term first."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def constant_value(self) -> Scalar:
        return self._terms.get((0,) * self.nvars, ZERO)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    # -- arithmetic ---------------------------------------------------

    def _lift(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        return Poly.const(Scalar.coerce(other), self.variables)

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        terms = dict(self._terms)
        for e, c in o._terms.items():
            terms[e] = terms.get(e, ZERO) + c
        return Poly(self.variables, terms)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                c = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
            return Poly(self.variables, {e: v * c for e, v in self._terms.items()})
        o = self._lift(other)
        out: dict[tuple[int, ...], Scalar] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, ZERO) + c1 * c2
        return Poly(self.variables, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = Scalar.coerce(other)
        return self * c.inverse()

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(ONE, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.variables == other.variables and self._terms == other._terms
        try:
            c = Scalar.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self == Poly.const(c, self.variables)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and substitution ------------------------------------

    def diff(self, var: int | str) -> Poly:
        i = self.variables.index(var) if isinstance(var, str) else var
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly(self.variables, out)

    def evaluate(self, point: Sequence) -> Scalar:
        """Exact value at a point with coordinates in Q(sqrt 2)."""
        if len(point) != self.nvars:
            raise ValueError("point dimension does not match variables")
        pt = [Scalar.coerce(p) for p in point]
        total = ZERO
        for e, c in self._terms.items():
            term = c
            for x, k in zip(pt, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for e, c in self._terms.items():
            term = float(c)
            for x, k in zip(point, e):
                if k:
                    term *= x**k
            total += term
        return total

    def compose(self, substitutions: Sequence[Poly]) -> Poly:
        """Substitute ``substitutions[i]`` for the i-th variable.

        All substitutions must share one variable list, which becomes the
        variable list of the result.
        """
        if len(substitutions) != self.nvars:
            raise ValueError("need one substitution per variable")
        if not substitutions:
            raise ValueError("cannot compose a polynomial in zero variables")
        new_vars = substitutions[0].variables
        for s in substitutions:
            if s.variables != new_vars:
                raise ValueError("substitutions must share variables")
        powers: list[dict[int, Poly]] = [dict() for _ in substitutions]

        def power(i: int, k: int) -> Poly:
            if k not in powers[i]:
                powers[i][k] = substitutions[i] ** k
            return powers[i][k]

        total = Poly.zero(new_vars)
        for e, c in self._terms.items():
            term = Poly.const(c, new_vars)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            total = total + term
        return total

    def conjugate(self) -> Poly:
        """Apply the Galois automorphism sqrt(2) -> -sqrt(2) to every coefficient."""
        return Poly(self.variables, {e: c.conjugate() for e, c in self._terms.items()})

    def rename(self, variables: Sequence[str]) -> Poly:
        if len(variables) != self.nvars:
            raise ValueError("renaming must keep the number of variables")
        return Poly(variables, self._terms)

    # -- univariate helpers -------------------------------------------

    def _require_univariate(self):
        if self.nvars != 1:
            raise ValueError("operation needs a univariate polynomial")

    def degree(self) -> int:
        self._require_univariate()
        return self.total_degree()

    def coeffs(self) -> list[Scalar]:
        """Coefficients lowest degree first (empty for zero)."""
        self._require_univariate()
        d = self.degree()
        return [self._terms.get((k,), ZERO) for k in range(d + 1)]

    def leading_coeff(self) -> Scalar:
        self._require_univariate()
        if self.is_zero():
            return ZERO
        return self._terms[(self.degree(),)]

    def monic(self) -> Poly:
        lc = self.leading_coeff()
        if not lc:
            raise ZeroDivisionError("zero polynomial has no monic form")
        return self / lc

    def __call__(self, x):
        self._require_univariate()
        return self.evaluate([x])

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        self._require_univariate()
        other = self._lift(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = self.coeffs()
        d = other.coeffs()
        dd = len(d) - 1
        inv_lc = d[-1].inverse()
        q = [ZERO] * max(len(r) - dd, 0)
        for k in range(len(r) - 1, dd - 1, -1):
            c = r[k] * inv_lc
            if c:
                q[k - dd] = c
                for j in range(dd + 1):
                    r[k - dd + j] = r[k - dd + j] - c * d[j]
        var = self.variables[0]
        return Poly.from_coeffs(q, var), Poly.from_coeffs(r[:dd] if dd > 0 else [], var)

    def __floordiv__(self, other: Poly) -> Poly:
        return self.divmod(other)[0]

    def __mod__(self, other: Poly) -> Poly:
        return self.divmod(other)[1]

    # -- display ------------------------------------------------------

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            cs = str(c)
            if not mono:
                parts.append(cs if c.b == 0 or c.a == 0 else f"({cs})")
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            elif c.b != 0 and c.a != 0:
                parts.append(f"({cs})*{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Poly({self.variables}, {str(self)!r})"


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd of two univariate polynomials (zero if both are zero)."""
    a, b = p, q
    while not b.is_zero():
        a, b = b, a % b
    if a.is_zero():
        return a
    return a.monic()


def coordinate_ring(n: int, prefix: str = "x") -> tuple[str, ...]:
    """Variable names ``x1..xn``."""
    return tuple(f"{prefix}{i}" for i in range(1, n + 1))


def coordinates(n: int, prefix: str = "x") -> list[Poly]:
    names = coordinate_ring(n, prefix)
    return [Poly.var(v, names) for v in names]
