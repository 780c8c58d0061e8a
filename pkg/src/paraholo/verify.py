"""Verification runs that assemble engine results into reports."""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .algebra import ComplexMatrix, generate_algebra, irreducibility_verdict, is_block_F, phi_inv
from .connection import (
    FormMatrix,
    PolyForm,
    connection_invariant_under,
    curvature,
    exterior_d,
    is_parallel,
    linear_pullback,
    parallel_defect,
    wedge,
)
from .exact import ExactMatrix, Poly, Scalar, char_poly, kernel_basis, span_basis
from .forms import BilinearForm, ProportionalFormsError, are_independent, multi_pencil_reduce, pencil_reduce
from .paper import forbidden_functionals, g_matrix, gamma_components, k_form, l_form, s_matrix, theta
from .report import Report, SkipCheck
from .scenario import Scenario
from .transport import (
    Curve,
    QuotientLoop,
    curvature_span,
    curve_pullback,
    quotient_holonomy,
    transport,
    validate_loop,
)

DEFAULT_TOL = 1e-10
DEFAULT_SEED = 42


@dataclass(frozen=True)
class PaperData:
    """Inputs of the four-dimensional example; override fields to probe failures."""

    k: ExactMatrix
    l: ExactMatrix
    g: ExactMatrix
    theta: FormMatrix
    gamma: Curve
    forbidden: tuple[tuple[Scalar, ...], ...]

    @classmethod
    def default(cls) -> PaperData:
        return cls(k_form(), l_form(), g_matrix(), theta(), Curve(tuple(gamma_components())),
                   tuple(forbidden_functionals()))

    @classmethod
    def from_scenario(cls, s: Scenario) -> PaperData:
        if len(s.metrics) < 2 or not s.loops:
            raise ValueError("scenario needs two metrics and a loop")
        g = s.nontrivial_deck()
        if g is None:
            raise ValueError("scenario deck group is trivial")
        return cls(s.metrics[0].matrix, s.metrics[1].matrix, g, s.theta, s.loops[0].curve, s.forbidden)

    def with_g(self, g: ExactMatrix) -> PaperData:
        return replace(self, g=g)

    @property
    def alpha(self) -> PolyForm:
        return self.theta[0, 1]

    @property
    def beta(self) -> PolyForm:
        return self.theta[0, 3]

    def loop(self) -> QuotientLoop:
        return QuotientLoop(self.gamma, self.g, self.forbidden, "gamma")


def _nonzero_entries(m: ExactMatrix) -> dict[str, str]:
    return {f"({i + 1},{j + 1})": str(m[i, j]) for i in range(m.nrows) for j in range(m.ncols) if m[i, j]}


def _form_residual(f: FormMatrix) -> dict[str, str]:
    return {f"({i + 1},{j + 1})": str(f[i, j]) for i in range(f.n) for j in range(f.n) if not f[i, j].is_zero()}


def _max_abs(a) -> float:
    return float(np.abs(np.asarray(a, dtype=float)).max()) if np.size(a) else 0.0


def _gl2c_basis() -> list[ExactMatrix]:
    out = []
    for i in range(2):
        for j in range(2):
            e = ExactMatrix([[1 if (r, c) == (i, j) else 0 for c in range(2)] for r in range(2)])
            z = ExactMatrix.zeros(2)
            out.append(phi_inv(ComplexMatrix(e, z)))
            out.append(phi_inv(ComplexMatrix(z, e)))
    return out


class _Cache:
    """Memoizes intermediate results so later checks can reuse earlier work."""

    def __init__(self):
        self._store = {}

    def get(self, key, fn):
        if key not in self._store:
            try:
                self._store[key] = (True, fn())
            except Exception as exc:  # noqa: BLE001
                self._store[key] = (False, exc)
        ok, val = self._store[key]
        if not ok:
            raise val
        return val


def run_paper_verification(tol: float = DEFAULT_TOL, data: PaperData | None = None,
                           seed: int = DEFAULT_SEED, scenario_name: str = "paper") -> Report:
    """Full checklist for the four-dimensional example; never aborts midway."""
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    d = data or PaperData.default()
    rep = Report("verify-paper", scenario_name, seed, tol)
    cache = _Cache()
    n = d.g.nrows
    ident = ExactMatrix.identity(n)

    def group_f():
        return is_block_F(d.g), {"G": d.g}

    def involution():
        res = d.g @ d.g - ident
        return res.is_zero(), {"residual": _nonzero_entries(res)}

    def isometry(c, label):
        def body():
            res = d.g.T @ c @ d.g - c
            return res.is_zero(), {"metric": label, "residual": _nonzero_entries(res)}
        return body

    def metrics_split():
        k, l = BilinearForm(d.k, "K"), BilinearForm(d.l, "L")
        ok = k.signature == (2, 2) and l.signature == (2, 2) and are_independent([k, l])
        return ok, {"K": k.signature, "L": l.signature, "independent": are_independent([k, l])}

    def charpoly():
        p = char_poly(d.g)
        x = Poly.var("x", ("x",))
        target = (x * x - 1) ** 2
        return p == target, {"char_poly": p, "expected": target}

    def fixed_space():
        basis = kernel_basis(d.g - ident)
        return len(basis) == 2, {"dim": len(basis), "basis": basis}

    def anticommute():
        res = d.g @ d.theta + d.theta @ d.g
        return res.is_zero(), {"residual": _form_residual(res)}

    def pullback_sign():
        res = linear_pullback(d.g, d.theta) + d.theta
        return res.is_zero(), {"residual": _form_residual(res)}

    def invariance():
        return connection_invariant_under(d.g, d.theta), {}

    def parallel(c, label, expect=True):
        def body():
            res = parallel_defect(d.theta, c)
            return res.is_zero() == expect, {"metric": label, "parallel": res.is_zero(),
                                             "defect_entries": len(_form_residual(res))}
        return body

    omega = lambda: cache.get("omega", lambda: curvature(d.theta))  # noqa: E731

    def flat_wedge():
        res = wedge(d.theta, d.theta)
        return res.is_zero(), {"residual": _form_residual(res)}

    def omega_is_dtheta():
        res = omega() - exterior_d(d.theta)
        return res.is_zero(), {"residual": _form_residual(res)}

    def d_form(form, i, j, label):
        def body():
            got = form().d()
            want = (PolyForm.dx(i, d.theta.variables) ^ PolyForm.dx(j, d.theta.variables)) * 2
            return got == want, {"form": label, "d": str(got), "expected": str(want)}
        return body

    def loop_valid():
        v = validate_loop(d.loop())
        return v.valid, {"endpoint_ok": v.endpoint_ok, "avoids_forbidden": v.avoids_forbidden,
                         "offending_interval": v.offending_interval, "messages": list(v.messages)}

    def pullback_zero():
        pm = curve_pullback(d.theta, d.gamma)
        nz = {f"({i + 1},{j + 1})": str(p) for i, r in enumerate(pm) for j, p in enumerate(r) if not p.is_zero()}
        return not nz, {"nonzero_entries": nz}

    def holonomy():
        return cache.get("hol", lambda: quotient_holonomy(d.theta, d.loop(), tol))

    def holonomy_is_g():
        res = holonomy()
        vals = {"method": res.method, "error_estimate": res.error_estimate}
        if res.exact is not None:
            vals["holonomy"] = res.exact
            return res.exact == d.g, vals
        dev = _max_abs(res.matrix - d.g.to_numpy())
        vals.update(holonomy=res.matrix, deviation=dev)
        return dev <= tol, vals

    def base_point():
        return d.gamma.point(0)

    def span():
        return cache.get("span", lambda: curvature_span(omega(), base_point()))

    def span_check():
        sp = span()
        want = span_basis([s_matrix(1, 0).flatten(), s_matrix(0, 1).flatten()])
        got = [m.flatten() for m in sp]
        return got == want, {"point": base_point(), "dim": len(sp), "basis": sp}

    def generators():
        res = holonomy()
        h = res.exact if res.exact is not None else res.matrix
        return [h] + list(span())

    def algebra_check():
        alg = generate_algebra(generators())
        target = _gl2c_basis()
        inside = all(alg.contains(m) for m in target)
        return alg.dim == 8 and inside, {"dim": alg.dim, "contains_gl2c": inside, "mode": alg.mode}

    def irreducible():
        v = irreducibility_verdict(generators(), seed=seed)
        vals = {"outcome": v.outcome, "certificate": v.certificate, "algebra_dim": v.algebra_dim,
                "trace": list(v.trace)}
        if v.complex_structure is not None:
            vals["complex_structure"] = v.complex_structure.matrix
        return v.irreducible, vals

    rep.run("G in F", "G = [[A, B], [-B, A]]", group_f)
    rep.run("G^2 = I", "G^2 = I", involution)
    rep.run("G preserves K", "tG K G = K", isometry(d.k, "K"))
    rep.run("G preserves L", "tG L G = L", isometry(d.l, "L"))
    rep.run("metrics split and independent", "sig K = sig L = (2,2), K and L independent", metrics_split)
    rep.run("char_poly(G)", "char_poly(G) = (x^2 - 1)^2", charpoly)
    rep.run("fixed space of G", "dim ker(G - I) = 2", fixed_space)
    rep.run("G anticommutes with theta", "G theta = -theta G", anticommute)
    rep.run("pullback of theta by G", "L_G^* theta = -theta", pullback_sign)
    rep.run("connection invariant under G", "L_G^* theta = G theta G^-1", invariance)
    rep.run("K parallel", "t(theta) K + K theta = 0", parallel(d.k, "K"))
    rep.run("L parallel", "t(theta) L + L theta = 0", parallel(d.l, "L"))
    rep.run("I not parallel (control)", "t(theta) + theta != 0", parallel(ident, "I", expect=False))
    rep.run("theta wedge theta", "theta ∧ theta = 0", flat_wedge)
    rep.run("curvature equals d theta", "Omega = d theta + theta ∧ theta = d theta", omega_is_dtheta)
    rep.run("d alpha", "d alpha = 2 dx1 ∧ dx4", d_form(lambda: d.alpha, 1, 4, "alpha"))
    rep.run("d beta", "d beta = 2 dx2 ∧ dx3", d_form(lambda: d.beta, 2, 3, "beta"))
    rep.run("loop validation", "gamma(1) = G gamma(0), gamma avoids ker of the forbidden functionals",
            loop_valid)
    rep.run("theta along gamma", "theta(gamma') = 0", pullback_zero)
    rep.run("quotient holonomy", "holonomy of gamma = G", holonomy_is_g, tolerance=tol)
    rep.run("curvature span", "span Omega_x0(X_i, X_j) = {S(a, b)}", span_check)
    rep.run("generated algebra", "alg<G, S(1,0), S(0,1)> = phi^-1(gl(2;C)), dim 8", algebra_check)
    rep.run("irreducibility", "holonomy acts irreducibly on R^4", irreducible)
    return rep


# -- scenario commands ---------------------------------------------------------


def _loops(s: Scenario) -> list[QuotientLoop]:
    return [s.quotient_loop(lp) for lp in s.loops]


def _base_point(s: Scenario):
    if s.loops:
        return s.loops[0].curve.point(0)
    return tuple(Scalar(0) for _ in range(s.dimension))


def holonomy_generators(s: Scenario, tol: float) -> tuple[list, dict]:
    """Holonomy of every valid loop at the base point plus the curvature span there."""
    base = _base_point(s)
    gens = []
    used, skipped = [], []
    for ql in _loops(s):
        if ql.curve.point(0) != base or not validate_loop(ql).valid:
            skipped.append(ql.name)
            continue
        res = quotient_holonomy(s.theta, ql, tol)
        gens.append(res.exact if res.exact is not None else res.matrix)
        used.append(ql.name)
    span = curvature_span(curvature(s.theta), base)
    gens.extend(span)
    info = {"base_point": base, "loops": used, "skipped_loops": skipped, "curvature_span_dim": len(span)}
    return gens, info


def signature_report(s: Scenario, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> Report:
    rep = Report("signature", s.name, seed, tol)
    if not s.metrics:
        def skip():
            raise SkipCheck("scenario declares no metrics")
        rep.run("signature", "sig g = (p, q)", skip)
    for g in s.metrics:
        rep.run(f"signature of {g.name}", f"sig {g.name} = (p, q)",
                lambda g=g: (True, {"p": g.signature[0], "q": g.signature[1], "split": g.is_split()}))
    return rep


def parallel_report(s: Scenario, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> Report:
    rep = Report("parallel-check", s.name, seed, tol)
    for g in s.metrics:
        def body(g=g):
            res = parallel_defect(s.theta, g.matrix)
            return res.is_zero(), {"defect": _form_residual(res)}
        rep.run(f"{g.name} parallel", f"t(theta) {g.name} + {g.name} theta = 0", body)
    return rep


def transport_report(s: Scenario, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> Report:
    rep = Report("transport", s.name, seed, tol)
    for lp in s.loops:
        def body(lp=lp):
            res = transport(s.theta, lp.curve, tol)
            vals = {"method": res.method, "steps": res.steps, "error_estimate": res.error_estimate,
                    "matrix": res.exact if res.exact is not None else res.matrix}
            return res.error_estimate <= tol, vals
        mode = "exact" if all(p.is_zero() for r in curve_pullback(s.theta, lp.curve) for p in r) else "numeric"
        rep.run(f"transport along {lp.name}", "F' = -theta(gamma') F, F(0) = I", body, mode=mode, tolerance=tol)
    return rep


def holonomy_report(s: Scenario, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> Report:
    rep = Report("holonomy", s.name, seed, tol)
    cache = _Cache()
    parallel = [g for g in s.metrics if is_parallel(s.theta, g.matrix)]
    for ql in _loops(s):
        def valid(ql=ql):
            v = validate_loop(ql)
            return v.valid, {"endpoint_ok": v.endpoint_ok, "avoids_forbidden": v.avoids_forbidden,
                             "offending_interval": v.offending_interval, "messages": list(v.messages)}
        rep.run(f"{ql.name} valid", "gamma(1) = h gamma(0), gamma avoids the forbidden set", valid)

        def hol(ql=ql):
            res = cache.get(ql.name, lambda: quotient_holonomy(s.theta, ql, tol))
            return True, {"method": res.method, "error_estimate": res.error_estimate,
                          "matrix": res.exact if res.exact is not None else res.matrix}
        rep.run(f"holonomy of {ql.name}", "h F(1)", hol, tolerance=tol)
        for g in parallel:
            def keeps(ql=ql, g=g):
                res = cache.get(ql.name, lambda: quotient_holonomy(s.theta, ql, tol))
                if res.exact is not None:
                    r = res.exact.T @ g.matrix @ res.exact - g.matrix
                    return r.is_zero(), {"residual": _nonzero_entries(r)}
                f = res.matrix
                dev = _max_abs(f.T @ g.matrix.to_numpy() @ f - g.matrix.to_numpy())
                return dev <= max(tol, 1e3 * res.error_estimate), {"deviation": dev}
            rep.run(f"holonomy of {ql.name} preserves {g.name}", f"tH {g.name} H = {g.name}", keeps,
                    tolerance=tol)

    def span():
        sp = curvature_span(curvature(s.theta), _base_point(s))
        return True, {"point": _base_point(s), "dim": len(sp), "basis": sp}
    rep.run("curvature span", "span Omega_x0(X_i, X_j)", span)
    return rep


def irreducibility_report(s: Scenario, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> Report:
    rep = Report("irreducibility", s.name, seed, tol)

    def body():
        gens, info = holonomy_generators(s, tol)
        v = irreducibility_verdict(gens, seed=seed)
        vals = dict(info, outcome=v.outcome, certificate=v.certificate, algebra_dim=v.algebra_dim,
                    mode=v.mode, witness=v.witness, trace=list(v.trace))
        return v.outcome.value != "Unknown", vals
    rep.run("irreducibility verdict", "decisive verdict on the holonomy representation", body)
    return rep


def pencil_report(s: Scenario, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> Report:
    rep = Report("pencil", s.name, seed, tol)
    if len(s.metrics) < 2:
        def skip():
            raise SkipCheck("pencil needs at least two metrics")
        rep.run("pencil", "A = g1^-1 g2", skip)
        return rep
    for g1, g2 in combinations(s.metrics, 2):
        def body(g1=g1, g2=g2):
            r = pencil_reduce(g1, g2)
            return True, {"minimal_polynomial": r.minimal_polynomial, "verdict": r.verdict,
                          "subspaces": r.subspaces, "operator": r.operator}
        rep.run(f"pencil {g1.name}, {g2.name}", f"A = {g1.name}^-1 {g2.name}", body)
    if len(s.metrics) > 2:
        def multi():
            r = multi_pencil_reduce(list(s.metrics))
            return True, {"verdict": r.verdict, "subspaces": r.subspaces}
        rep.run("joint pencil", "invariant subspaces of all pairs", multi)
    return rep


# -- expected assertions -------------------------------------------------------


def _expect(kind: str):
    def deco(fn):
        _EXPECTATIONS[kind] = fn
        return fn
    return deco


_EXPECTATIONS: dict = {}


@_expect("signature")
def _e_signature(s, item, tol, seed):
    g = s.metric(item["metric"])
    return list(g.signature) == list(item["value"]), {"signature": g.signature}


@_expect("parallel")
def _e_parallel(s, item, tol, seed):
    got = is_parallel(s.theta, s.metric(item["metric"]).matrix)
    return got == item["value"], {"parallel": got}


@_expect("independent")
def _e_independent(s, item, tol, seed):
    names = item.get("metrics") or [g.name for g in s.metrics]
    got = are_independent([s.metric(nm) for nm in names])
    return got == item["value"], {"independent": got}


@_expect("deck_preserves_metric")
def _e_deck_metric(s, item, tol, seed):
    h, c = s.deck_group[item["deck"]], s.metric(item["metric"]).matrix
    got = (h.T @ c @ h - c).is_zero()
    return got == item["value"], {"preserves": got}


@_expect("connection_invariant")
def _e_invariant(s, item, tol, seed):
    got = connection_invariant_under(s.deck_group[item["deck"]], s.theta)
    return got == item["value"], {"invariant": got}


@_expect("char_poly")
def _e_char_poly(s, item, tol, seed):
    p = char_poly(s.deck_group[item["deck"]])
    want = Poly.from_coeffs([Scalar.coerce(c) for c in item["coefficients"]])
    return p == want, {"char_poly": p, "expected": want}


@_expect("fixed_space_dim")
def _e_fixed(s, item, tol, seed):
    h = s.deck_group[item["deck"]]
    dim = len(kernel_basis(h - ExactMatrix.identity(s.dimension)))
    return dim == item["value"], {"dim": dim}


@_expect("flat_wedge")
def _e_flat(s, item, tol, seed):
    got = wedge(s.theta, s.theta).is_zero()
    return got == item["value"], {"theta_wedge_theta_zero": got}


@_expect("loop_valid")
def _e_loop_valid(s, item, tol, seed):
    v = validate_loop(s.quotient_loop(item["loop"]))
    return v.valid == item["value"], {"valid": v.valid, "messages": list(v.messages)}


@_expect("pullback_zero")
def _e_pullback(s, item, tol, seed):
    pm = curve_pullback(s.theta, s.loop(item["loop"]).curve)
    got = all(p.is_zero() for r in pm for p in r)
    return got == item["value"], {"zero": got}


@_expect("holonomy_equals_deck")
def _e_hol_deck(s, item, tol, seed):
    ql = s.quotient_loop(item["loop"])
    res = quotient_holonomy(s.theta, ql, tol)
    if res.exact is not None:
        got = res.exact == ql.deck
    else:
        got = _max_abs(res.matrix - ql.deck.to_numpy()) <= tol
    return got == item["value"], {"equal": got, "method": res.method}


@_expect("curvature_span_dim")
def _e_span(s, item, tol, seed):
    dim = len(curvature_span(curvature(s.theta), _base_point(s)))
    return dim == item["value"], {"dim": dim}


@_expect("algebra_dim")
def _e_algebra(s, item, tol, seed):
    gens, info = holonomy_generators(s, tol)
    alg = generate_algebra(gens)
    return alg.dim == item["value"], dict(info, dim=alg.dim, mode=alg.mode)


@_expect("irreducibility")
def _e_irreducible(s, item, tol, seed):
    gens, _ = holonomy_generators(s, tol)
    v = irreducibility_verdict(gens, seed=seed)
    ok = v.outcome.value == item["value"]
    if ok and "certificate" in item:
        ok = v.certificate is not None and v.certificate.value == item["certificate"]
    return ok, {"outcome": v.outcome, "certificate": v.certificate}


@_expect("pencil_verdict")
def _e_pencil(s, item, tol, seed):
    names = item.get("metrics") or [g.name for g in s.metrics[:2]]
    try:
        r = pencil_reduce(s.metric(names[0]), s.metric(names[1]))
        verdict = r.verdict.value
    except ProportionalFormsError:
        verdict = "Proportional"
    return verdict == item["value"], {"verdict": verdict}


def _describe(item: dict) -> str:
    extras = [f"{k}={item[k]}" for k in ("metric", "metrics", "deck", "loop") if k in item]
    return item["check"] + (f" ({', '.join(map(str, extras))})" if extras else "")


def expected_report(s: Scenario, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> Report:
    """One check record per expected assertion of the scenario."""
    rep = Report("check", s.name, seed, tol)
    for k, item in enumerate(s.expected):
        fn = _EXPECTATIONS.get(item["check"])
        want = item.get("value", item.get("coefficients"))

        def body(fn=fn, item=item):
            if fn is None:
                raise ValueError(f"unknown check kind {item['check']!r}")
            return fn(s, item, tol, seed)
        rep.run(f"expected[{k}] {_describe(item)}", f"{item['check']} = {want}", body)
    return rep


COMMANDS = {
    "signature": signature_report,
    "parallel-check": parallel_report,
    "transport": transport_report,
    "holonomy": holonomy_report,
    "irreducibility": irreducibility_report,
    "pencil": pencil_report,
    "check": expected_report,
}
