"""Factorization of univariate polynomials of degree at most 6 over Q(sqrt 2).

The squarefree parts come from Yun's algorithm. Each squarefree part is
rescaled so that its roots are algebraic integers. Any monic factor then
has coefficients in Z[sqrt 2]. Such a factor is pinned down by the values of
its coefficients under the two real embeddings of Q(sqrt 2), so candidate
factors are assembled from subsets of the numerical roots of the
polynomial and of its Galois conjugate. Candidates whose coefficients round
to integers are confirmed by exact division, so numerical error can only
cost a missed factor and never a wrong one.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Sequence

import mpmath

from .poly import Poly, poly_gcd
from .scalar import ONE, Scalar

MAX_FACTOR_DEGREE = 6
_ROOT_DPS = 60
_SNAP_TOL = 1e-12


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: monic pairwise-coprime ``a_i`` with ``p ~ prod a_i^i``."""
    f = p.monic()
    if f.degree() == 0:
        return []
    df = f.diff(0)
    a0 = poly_gcd(f, df)
    b = f // a0
    c = df // a0
    d = c - b.diff(0)
    out = []
    i = 1
    while b.degree() > 0:
        a = poly_gcd(b, d)
        b = b // a
        c = d // a
        d = c - b.diff(0)
        if a.degree() > 0:
            out.append((a, i))
        i += 1
    return out


def _scale_to_integral(p: Poly) -> tuple[Poly, int]:
    """For monic ``p`` of degree n return ``(q, d)`` with ``q(y) = d^n p(y/d)`` in Z[sqrt 2][y]."""
    coeffs = p.coeffs()
    n = len(coeffs) - 1
    d = 1
    for c in coeffs:
        d = math.lcm(d, c.denominator_lcm())
    scaled = [c * d ** (n - i) for i, c in enumerate(coeffs)]
    return Poly.from_coeffs(scaled, p.variables[0]), d


def _numeric_roots(p: Poly, embedding: int) -> list:
    coeffs = p.coeffs()
    with mpmath.workdps(_ROOT_DPS):
        root2 = mpmath.sqrt(2) * embedding
        mp_coeffs = [mpmath.mpf(c.a.numerator) / c.a.denominator
                     + root2 * mpmath.mpf(c.b.numerator) / c.b.denominator
                     for c in reversed(coeffs)]
        return list(mpmath.polyroots(mp_coeffs, maxsteps=400, extraprec=4 * _ROOT_DPS))


def _elementary_symmetric(roots: Sequence) -> list:
    e = [mpmath.mpc(1)]
    for r in roots:
        e = [e[0]] + [e[j] + r * e[j - 1] for j in range(1, len(e))] + [r * e[-1]]
    return e


def _real_or_none(z):
    if abs(mpmath.im(z)) > _SNAP_TOL * max(1, abs(z)):
        return None
    return mpmath.re(z)


def _candidate_coefficients(roots: Sequence, k: int) -> list[list]:
    """Real coefficient vectors of monic degree-k products of root subsets."""
    out = []
    seen = set()
    for subset in combinations(range(len(roots)), k):
        e = _elementary_symmetric([roots[i] for i in subset])
        vals = []
        for j in range(1, k + 1):
            v = _real_or_none(e[j] * (-1) ** j)
            if v is None:
                break
            vals.append(v)
        else:
            key = tuple(round(float(v), 8) for v in vals)
            if key not in seen:
                seen.add(key)
                out.append(vals)
    return out


def _snap_integer(x) -> int | None:
    r = int(mpmath.nint(x))
    if abs(x - r) > 1e-9 * max(1, abs(x)):
        return None
    return r


def _find_factor(q: Poly, k: int) -> Poly | None:
    """A monic degree-k factor of integral squarefree ``q``, or None."""
    with mpmath.workdps(_ROOT_DPS):
        roots1 = _numeric_roots(q, +1)
        roots2 = _numeric_roots(q, -1)
        cands1 = _candidate_coefficients(roots1, k)
        cands2 = _candidate_coefficients(roots2, k)
        sqrt2 = mpmath.sqrt(2)
        for c1 in cands1:
            for c2 in cands2:
                coeffs = []
                for x1, x2 in zip(c1, c2):
                    u = _snap_integer((x1 + x2) / 2)
                    v = _snap_integer((x1 - x2) / (2 * sqrt2))
                    if u is None or v is None:
                        break
                    coeffs.append(Scalar(u, v))
                else:
                    # coeffs[j-1] multiplies y^(k-j)
                    cand = Poly.from_coeffs(list(reversed(coeffs)) + [ONE], q.variables[0])
                    if (q % cand).is_zero():
                        return cand
    return None


def _split_squarefree(p: Poly) -> list[Poly]:
    """Monic irreducible factors of a monic squarefree polynomial."""
    n = p.degree()
    if n <= 1:
        return [p] if n == 1 else []
    q, d = _scale_to_integral(p)
    for k in range(1, n // 2 + 1):
        f = _find_factor(q, k)
        if f is not None:
            # undo the scaling: f(y) with y = d x
            var = p.variables[0]
            scaled = Poly.from_coeffs([c / Scalar(d) ** (k - i) for i, c in enumerate(f.coeffs())], var)
            rest = p // scaled
            return [scaled] + _split_squarefree(rest)
    return [p]


def _sort_key(item: tuple[Poly, int]):
    f, m = item
    return (f.degree(), tuple(float(c) for c in reversed(f.coeffs())), m)


def factor_low_degree(p: Poly) -> list[tuple[Poly, int]]:
    """Monic irreducible factors over Q(sqrt 2) with multiplicities.

    The product of ``f**m`` over the result equals ``p.monic()``.
    """
    if p.nvars != 1:
        raise ValueError("factor_low_degree expects a univariate polynomial")
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if p.degree() > MAX_FACTOR_DEGREE:
        raise ValueError(f"degree {p.degree()} exceeds supported maximum {MAX_FACTOR_DEGREE}")
    out = []
    for part, mult in squarefree_decomposition(p):
        for f in _split_squarefree(part):
            out.append((f, mult))
    return sorted(out, key=_sort_key)


def expand_factors(factors: Sequence[tuple[Poly, int]], var: str = "x") -> Poly:
    if factors:
        var = factors[0][0].variables[0]
    result = Poly.const(ONE, (var,))
    for f, m in factors:
        result = result * f**m
    return result


def is_irreducible(p: Poly) -> bool:
    fs = factor_low_degree(p)
    return len(fs) == 1 and fs[0][1] == 1
