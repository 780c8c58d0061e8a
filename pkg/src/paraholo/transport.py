"""Parallel transport along polynomial curves, quotient loops and curvature spans.

The transport equation in the frame ``dx`` is the linear initial value problem

    F'(t) = -theta(gamma'(t)) F(t),    F(0) = I,    t in [0, 1].

``theta(gamma')`` is an exact matrix of polynomials in ``t``. When it is the
zero polynomial the transport is the identity, exactly. When it is constant
the transport is a matrix exponential. Otherwise classical RK4 is run on a
doubling step sequence, and Richardson's estimate ``|F_{h/2} - F_h| / 15``
is driven below ``tol * max(1, |F|)``: the tolerance is relative once the
transport matrix itself is large, since the holonomy of an indefinite metric
need not be bounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg

from .connection import FormMatrix
from .exact import ExactMatrix, Poly, Scalar, kernel_basis, poly_gcd, span_basis
from .exact.matrix import Vector

T_VARS = ("t",)
MAX_STEPS = 2**18
_INITIAL_STEPS = 8
_ISOLATION_BITS = 12


class StepSizeUnderflow(RuntimeError):
    pass


class InvalidLoopError(ValueError):
    pass


@dataclass(frozen=True)
class Curve:
    """Polynomial curve ``t -> (gamma_1(t), ..., gamma_n(t))`` on ``[0, 1]``."""

    components: tuple[Poly, ...]

    def __post_init__(self):
        comps = tuple(c if isinstance(c, Poly) else Poly.const(c, T_VARS) for c in self.components)
        if not comps:
            raise ValueError("a curve needs at least one component")
        for c in comps:
            if c.variables != T_VARS:
                raise ValueError("curve components must be polynomials in t")
        object.__setattr__(self, "components", comps)

    @classmethod
    def line(cls, start: Sequence, end: Sequence) -> Curve:
        t = Poly.var("t", T_VARS)
        return cls(tuple(Poly.const(a, T_VARS) + t * (Scalar.coerce(b) - Scalar.coerce(a))
                         for a, b in zip(start, end)))

    @classmethod
    def constant(cls, point: Sequence) -> Curve:
        return cls(tuple(Poly.const(a, T_VARS) for a in point))

    @property
    def dim(self) -> int:
        return len(self.components)

    def velocity(self) -> tuple[Poly, ...]:
        return tuple(c.diff(0) for c in self.components)

    def point(self, t) -> Vector:
        return tuple(c.evaluate([t]) for c in self.components)

    def point_float(self, t: float) -> np.ndarray:
        return np.array([c.evaluate_float([t]) for c in self.components])

    def reparametrize(self, s: Poly) -> Curve:
        return Curve(tuple(c.compose([s]) for c in self.components))

    def restrict(self, a, b) -> Curve:
        """The piece on ``[a, b]``, reparametrized over ``[0, 1]``."""
        t = Poly.var("t", T_VARS)
        a, b = Scalar.coerce(a), Scalar.coerce(b)
        return self.reparametrize(t * (b - a) + a)

    def reversed(self) -> Curve:
        t = Poly.var("t", T_VARS)
        return self.reparametrize(1 - t)


@dataclass(frozen=True)
class QuotientLoop:
    """A chart curve whose endpoint is the deck image of its start point.

    ``forbidden`` lists linear functionals whose common zero set is the
    subspace removed from the chart; an empty tuple removes nothing.
    """

    curve: Curve
    deck: ExactMatrix
    forbidden: tuple[tuple[Scalar, ...], ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "forbidden",
                           tuple(tuple(Scalar.coerce(x) for x in f) for f in self.forbidden))


def functionals_from_basis(basis: Sequence[Sequence], n: int) -> tuple[Vector, ...]:
    """Functionals whose common kernel is ``span(basis)``."""
    if not basis:
        return tuple(tuple(Scalar(1) if i == j else Scalar(0) for j in range(n)) for i in range(n))
    return tuple(kernel_basis(ExactMatrix(basis)))


@dataclass(frozen=True)
class TransportResult:
    matrix: np.ndarray
    error_estimate: float
    exact: ExactMatrix | None = None
    method: str = "rk4"
    steps: int = 0

    def __eq__(self, other):
        if not isinstance(other, TransportResult):
            return NotImplemented
        return (np.array_equal(self.matrix, other.matrix) and self.exact == other.exact
                and self.method == other.method)


@dataclass(frozen=True)
class LoopValidation:
    endpoint_ok: bool
    avoids_forbidden: bool
    offending_interval: tuple[Fraction, Fraction] | None = None
    messages: tuple[str, ...] = field(default=())

    @property
    def valid(self) -> bool:
        return self.endpoint_ok and self.avoids_forbidden

    def __bool__(self) -> bool:
        return self.valid


# -- pullback along a curve ------------------------------------------------


def curve_pullback(theta: FormMatrix, gamma: Curve) -> tuple[tuple[Poly, ...], ...]:
    """Entries ``theta^i_j(gamma'(t))`` as exact polynomials in ``t``."""
    if theta.degree != 1:
        raise ValueError("curve pullback needs a matrix of 1-forms")
    if theta.n != gamma.dim:
        raise ValueError("curve dimension does not match the connection")
    vel = gamma.velocity()
    cache: dict[Poly, Poly] = {}

    def along(p: Poly) -> Poly:
        if p not in cache:
            cache[p] = p.compose(list(gamma.components))
        return cache[p]

    rows = []
    for i in range(theta.n):
        row = []
        for j in range(theta.n):
            acc = Poly.zero(T_VARS)
            for (k,), coeff in theta[i, j].components.items():
                if vel[k]:
                    acc = acc + along(coeff) * vel[k]
            row.append(acc)
        rows.append(tuple(row))
    return tuple(rows)


def _coefficient_tensor(pm: Sequence[Sequence[Poly]]) -> np.ndarray:
    """``C[d, i, j]`` = coefficient of ``t^d`` in entry ``(i, j)``."""
    n = len(pm)
    deg = max((p.degree() for r in pm for p in r), default=0)
    c = np.zeros((max(deg, 0) + 1, n, n))
    for i, r in enumerate(pm):
        for j, p in enumerate(r):
            for d, coef in enumerate(p.coeffs()):
                c[d, i, j] = float(coef)
    return c


def _eval_tensor(c: np.ndarray, ts: np.ndarray) -> np.ndarray:
    out = np.zeros((len(ts),) + c.shape[1:])
    for d in range(c.shape[0] - 1, -1, -1):
        out = out * ts[:, None, None] + c[d]
    return out


def rk4_fixed(pullback: Sequence[Sequence[Poly]], steps: int) -> np.ndarray:
    """Classical RK4 for ``F' = -P(t) F`` on ``[0, 1]`` with ``steps`` equal steps."""
    c = _coefficient_tensor(pullback)
    n = c.shape[1]
    h = 1.0 / steps
    mats = -_eval_tensor(c, np.linspace(0.0, 1.0, 2 * steps + 1))
    f = np.eye(n)
    for k in range(steps):
        a0, am, a1 = mats[2 * k], mats[2 * k + 1], mats[2 * k + 2]
        k1 = a0 @ f
        k2 = am @ (f + 0.5 * h * k1)
        k3 = am @ (f + 0.5 * h * k2)
        k4 = a1 @ (f + h * k3)
        f = f + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return f


def transport(theta: FormMatrix, gamma: Curve, tol: float = 1e-10, method: str = "auto") -> TransportResult:
    """Parallel transport matrix ``F(1)`` along ``gamma``.

    ``method`` is ``"auto"`` (exact shortcuts when available) or ``"rk4"``
    (always integrate numerically).
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    if method not in ("auto", "rk4"):
        raise ValueError(f"unknown transport method {method!r}")
    pm = curve_pullback(theta, gamma)
    n = theta.n
    if method == "auto":
        if all(p.is_zero() for r in pm for p in r):
            ident = ExactMatrix.identity(n)
            return TransportResult(np.eye(n), 0.0, ident, "exact-zero", 0)
        if all(p.is_constant() for r in pm for p in r):
            gen = -np.array([[float(p.constant_value()) for p in r] for r in pm])
            f = scipy.linalg.expm(gen)
            est = 64 * np.finfo(float).eps * max(1.0, np.abs(gen).sum(axis=1).max()) * np.abs(f).max()
            return TransportResult(f, float(est), None, "expm", 0)
    steps = _INITIAL_STEPS
    coarse = rk4_fixed(pm, steps)
    while True:
        fine = rk4_fixed(pm, 2 * steps)
        err = float(np.abs(fine - coarse).max()) / 15.0
        if err <= tol * max(1.0, float(np.abs(fine).max())):
            return TransportResult(fine, err, None, "rk4", 2 * steps)
        steps *= 2
        if 2 * steps > MAX_STEPS:
            raise StepSizeUnderflow(f"no convergence to {tol} within {MAX_STEPS} steps (estimate {err:.3e})")
        coarse = fine


# -- loop validation ---------------------------------------------------------


def _sturm_chain(p: Poly) -> list[Poly]:
    chain = [p, p.diff(0)]
    while not chain[-1].is_zero() and chain[-1].degree() > 0:
        chain.append(-(chain[-2] % chain[-1]))
    return [q for q in chain if not q.is_zero()]


def _sign_changes(chain: list[Poly], x) -> int:
    signs = [s for s in (q(x).sign() for q in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _roots_in(chain: list[Poly], a, b) -> int:
    """Distinct real roots in ``(a, b]`` of the squarefree head of the chain."""
    return _sign_changes(chain, a) - _sign_changes(chain, b)


def _isolate_root(p: Poly) -> tuple[Fraction, Fraction] | None:
    """Exact isolating interval for a root of ``p`` in ``[0, 1]``, or None."""
    if p.is_zero():
        return (Fraction(0), Fraction(1))
    if p.degree() <= 0:
        return None
    g = poly_gcd(p, p.diff(0))
    sq = p // g if g.degree() > 0 else p
    for end in (Fraction(0), Fraction(1)):
        if not sq(end):
            return (end, end)
    chain = _sturm_chain(sq)
    lo, hi = Fraction(0), Fraction(1)
    if _roots_in(chain, lo, hi) == 0:
        return None
    for _ in range(_ISOLATION_BITS):
        mid = (lo + hi) / 2
        if not sq(mid):
            return (mid, mid)
        if _roots_in(chain, lo, mid) > 0:
            hi = mid
        else:
            lo = mid
    return (lo, hi)


def validate_loop(loop: QuotientLoop) -> LoopValidation:
    """Exact checks: ``gamma(1) = deck gamma(0)`` and ``gamma`` never meets the forbidden subspace."""
    gamma = loop.curve
    msgs = []
    if loop.deck.shape != (gamma.dim, gamma.dim):
        raise ValueError("deck transformation has the wrong shape")
    start, end = gamma.point(0), gamma.point(1)
    endpoint_ok = end == loop.deck @ start
    if not endpoint_ok:
        msgs.append("endpoint mismatch: gamma(1) != deck * gamma(0)")
    offending = None
    if loop.forbidden:
        restricted = []
        for ell in loop.forbidden:
            acc = Poly.zero(T_VARS)
            for c, comp in zip(ell, gamma.components):
                if c:
                    acc = acc + comp * c
            restricted.append(acc)
        g = Poly.zero(T_VARS)
        for p in restricted:
            g = poly_gcd(g, p)
        offending = _isolate_root(g)
        if offending is not None:
            lo, hi = offending
            msgs.append(f"curve meets the forbidden subspace for t in [{lo}, {hi}]")
    return LoopValidation(endpoint_ok, offending is None, offending, tuple(msgs))


def quotient_holonomy(theta: FormMatrix, loop: QuotientLoop, tol: float = 1e-10, method: str = "auto") -> TransportResult:
    """Holonomy of a quotient loop: ``deck @ transport(theta, curve)``."""
    report = validate_loop(loop)
    if not report.valid:
        raise InvalidLoopError("; ".join(report.messages))
    res = transport(theta, loop.curve, tol, method)
    deck_f = loop.deck.to_numpy()
    exact = loop.deck @ res.exact if res.exact is not None else None
    mat = exact.to_numpy() if exact is not None else deck_f @ res.matrix
    err = res.error_estimate * float(np.abs(deck_f).sum(axis=1).max())
    return TransportResult(mat, err, exact, res.method, res.steps)


# -- infinitesimal holonomy ----------------------------------------------------


def curvature_span(omega: FormMatrix, point: Sequence) -> list[ExactMatrix]:
    """Canonical basis of the span of ``Omega_x(X_i, X_j)``, ``i < j``.

    Only the order-zero terms; covariant derivatives of ``Omega`` are not added.
    """
    if omega.degree != 2:
        raise ValueError("curvature span needs a matrix of 2-forms")
    n = omega.n
    if len(point) != n:
        raise ValueError("point dimension does not match")
    mats = [omega.evaluate_on(point, i, j) for i in range(n) for j in range(i + 1, n)]
    basis = span_basis([m.flatten() for m in mats])
    return [ExactMatrix.from_flat(v, n) for v in basis]
