"""Acceptance criteria 1-11, one test each.

Every test records a one-line result that the terminal summary prints as
``criterion N: PASS/FAIL``; ``python3 tests/test_acceptance.py`` prints the
same lines without pytest.
"""

from __future__ import annotations

import math
import random
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from paraholo.algebra import (  # noqa: E402
    Certificate,
    ComplexMatrix,
    Outcome,
    generate_algebra,
    irreducibility_verdict,
    phi_inv,
)
from paraholo.connection import (  # noqa: E402
    PolyForm,
    curvature,
    exterior_d,
    is_parallel,
    linear_pullback,
    wedge,
)
from paraholo.exact import ExactMatrix, Poly, char_poly, is_invariant, kernel_basis, span_basis  # noqa: E402
from paraholo.forms import Verdict, pencil_reduce, signature  # noqa: E402
from paraholo.paper import (  # noqa: E402
    CHART,
    alpha_form,
    beta_form,
    forbidden_functionals,
    g_matrix,
    gamma_components,
    k_form,
    l_form,
    line_components,
    s_matrix,
    theta,
)
from paraholo.transport import (  # noqa: E402
    Curve,
    QuotientLoop,
    curvature_span,
    curve_pullback,
    quotient_holonomy,
    rk4_fixed,
    transport,
    validate_loop,
)
from paraholo.verify import run_paper_verification  # noqa: E402
from strategies import random_loop, random_pencil_pair  # noqa: E402

X = Poly.var("x", ("x",))
G, K, L, TH = g_matrix(), k_form(), l_form(), theta()
I4 = ExactMatrix.identity(4)


def paper_loop() -> QuotientLoop:
    return QuotientLoop(Curve(tuple(gamma_components())), G, tuple(forbidden_functionals()))


def criterion_1():
    rep = run_paper_verification()
    exact = (rep.check("G in F").status == "pass" and G @ G == I4
             and G.T @ K @ G == K and G.T @ L @ G == L)
    ok = rep.passed and exact
    return ok, f"verify-paper {rep.overall} ({len(rep.checks)} checks); G in F, G^2 = I, tGKG = K, tGLG = L exact"


def criterion_2():
    p = char_poly(G)
    dim = len(kernel_basis(G - I4))
    return p == (X * X - 1) ** 2 and dim == 2, f"char_poly(G) = {p}, dim ker(G - I) = {dim}"


def criterion_3():
    a = (G @ TH + TH @ G).is_zero()
    b = (linear_pullback(G, TH) + TH).is_zero()
    return a and b, f"G theta + theta G = 0: {a}; L_G^* theta + theta = 0: {b}"


def criterion_4():
    k, l_ = is_parallel(TH, K), is_parallel(TH, L)
    i = is_parallel(TH, I4)
    return k and l_ and not i, f"K parallel: {k}, L parallel: {l_}, I parallel (control): {i}"


def criterion_5():
    dx = [PolyForm.dx(k, CHART) for k in range(1, 5)]
    flat = wedge(TH, TH).is_zero()
    omega = curvature(TH) == exterior_d(TH)
    da = alpha_form().d() == (dx[0] ^ dx[3]) * 2
    db = beta_form().d() == (dx[1] ^ dx[2]) * 2
    ok = flat and omega and da and db
    return ok, f"theta^theta = 0: {flat}, Omega = d theta: {omega}, d alpha: {da}, d beta: {db}"


def criterion_6():
    pm = curve_pullback(TH, paper_loop().curve)
    zero = all(p.is_zero() for r in pm for p in r)
    res = quotient_holonomy(TH, paper_loop())
    ok = zero and res.method == "exact-zero" and res.exact == G
    return ok, f"theta(gamma') = 0: {zero}; holonomy via {res.method} equals G exactly: {res.exact == G}"


def criterion_7():
    c, s = math.cos(1.0), math.sin(1.0)
    closed = np.zeros((4, 4))
    closed[np.ix_([0, 1], [0, 1])] = closed[np.ix_([2, 3], [2, 3])] = [[c, s], [-s, c]]
    line = Curve(tuple(line_components()))
    auto = np.abs(transport(TH, line).matrix - closed).max()
    rk4 = np.abs(transport(TH, line, tol=1e-12, method="rk4").matrix - closed).max()
    pm = curve_pullback(TH, line)
    errs = [np.abs(rk4_fixed(pm, n) - closed).max() for n in (8, 16, 32)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    ok = auto <= 1e-9 and rk4 <= 1e-9 and all(abs(r - 16) <= 0.2 * 16 for r in ratios)
    return ok, (f"line transport error {auto:.1e} (expm), {rk4:.1e} (rk4); "
                f"halving ratios {', '.join(f'{r:.2f}' for r in ratios)}")


def _gl2c_basis() -> list[ExactMatrix]:
    out = []
    for i in range(2):
        for j in range(2):
            e = ExactMatrix([[int((a, b) == (i, j)) for b in range(2)] for a in range(2)])
            out.append(phi_inv(ComplexMatrix(e, ExactMatrix.zeros(2))))
            out.append(phi_inv(ComplexMatrix(ExactMatrix.zeros(2), e)))
    return out


def criterion_8():
    span = curvature_span(curvature(TH), paper_loop().curve.point(0))
    want = span_basis([s_matrix(1, 0).flatten(), s_matrix(0, 1).flatten()])
    span_ok = [m.flatten() for m in span] == want
    alg = generate_algebra([G, s_matrix(1, 0), s_matrix(0, 1)])
    target = _gl2c_basis()
    equal = alg.dim == 8 and all(alg.contains(m) for m in target) and \
        generate_algebra(target).dim == 8
    return span_ok and equal, f"curvature span dim {len(span)} = {{S(a,b)}}: {span_ok}; algebra dim {alg.dim}, " \
                              f"equals phi^-1(gl(2;C)): {equal}"


def criterion_9():
    v = irreducibility_verdict([G, s_matrix(1, 0), s_matrix(0, 1)])
    paper_ok = v.outcome is Outcome.IRREDUCIBLE and v.certificate is Certificate.CENTRAL_COMPLEX_STRUCTURE
    z = ExactMatrix.zeros(2)
    control = [ExactMatrix.block([[ExactMatrix([[1, 2], [3, 4]]), z], [z, ExactMatrix([[0, 1], [-1, 0]])]]),
               ExactMatrix.block([[ExactMatrix([[0, 1], [1, 0]]), z], [z, ExactMatrix([[2, 0], [1, 2]])]])]
    c = irreducibility_verdict(control)
    witness_ok = c.reducible and 0 < len(c.witness) < 4 and all(is_invariant(g, c.witness) for g in control)
    cert = v.certificate.value if v.certificate else None
    return paper_ok and witness_ok, (f"example generators: {v.outcome.value} ({cert}); "
                                     f"block-diagonal control: {c.outcome.value}, witness dim "
                                     f"{len(c.witness or [])} verified: {witness_ok}")


def criterion_10():
    rng = random.Random(20240601)
    cases = failures = 0
    while cases < 200:
        n = rng.randint(2, 5)
        g1, g2 = random_pencil_pair(rng, n)
        p, q = signature(g1)
        if p == q:
            continue
        cases += 1
        r = pencil_reduce(g1, g2)
        if not (r.found_subspace and r.subspaces and all(
                0 < len(w) < n and is_invariant(r.operator, w) for w in r.subspaces)):
            failures += 1
    kl = pencil_reduce(K, L)
    kl_ok = kl.verdict is Verdict.COMPLEX_STRUCTURE_TYPE and kl.minimal_polynomial == X * X + 1
    return failures == 0 and kl_ok, (f"{cases - failures}/{cases} unequal-signature pairs split; "
                                     f"(K, L): {kl.verdict.value}, minimal polynomial {kl.minimal_polynomial}")


def criterion_11():
    rng = random.Random(11)
    kf, lf = K.to_numpy(), L.to_numpy()
    loops = worst = 0
    while loops < 100:
        lp = random_loop(rng, rng.choice([G, I4]), forbidden_functionals())
        if not validate_loop(lp).valid:
            continue
        loops += 1
        f = quotient_holonomy(TH, lp).matrix
        worst = max(worst, np.abs(f.T @ kf @ f - kf).max(), np.abs(f.T @ lf @ f - lf).max())
    return worst <= 1e-8, f"{loops} validated loops, max |tFKF - K|, |tFLF - L| = {worst:.2e} (tol 1e-8)"


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 12)}


def _record(k: int):
    start = time.perf_counter()
    ok, text = CRITERIA[k]()
    elapsed = time.perf_counter() - start
    try:
        from conftest import ACCEPTANCE
        ACCEPTANCE[k] = (ok, f"{text} [{elapsed:.1f}s]")
    except ImportError:
        pass
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {text}")
    assert ok, text
    assert elapsed < 60


def test_criterion_01():
    _record(1)


def test_criterion_02():
    _record(2)


def test_criterion_03():
    _record(3)


def test_criterion_04():
    _record(4)


def test_criterion_05():
    _record(5)


def test_criterion_06():
    _record(6)


def test_criterion_07():
    _record(7)


def test_criterion_08():
    _record(8)


def test_criterion_09():
    _record(9)


def test_criterion_10():
    _record(10)


def test_criterion_11():
    _record(11)


if __name__ == "__main__":
    failed = 0
    for key, fn in CRITERIA.items():
        ok, text = fn()
        failed += not ok
        print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {text}")
    sys.exit(1 if failed else 0)
