"""Scenario files: a JSON description of a chart connection, metrics and quotient loops.

Exact scalars are strings such as ``"1-√2"`` or ``"3/4√2"``; polynomials are
objects mapping comma-separated exponent tuples to scalars, e.g.
``{"1,0,0,0": "1"}`` for ``x1``. See ``docs/scenario-format.md``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .connection import FormMatrix, PolyForm
from .exact import ExactMatrix, Poly, Scalar, SingularMatrixError, mat_inverse
from .forms import BilinearForm, DegenerateFormError
from .transport import T_VARS, Curve, QuotientLoop

FORMAT_TAG = "paraholo-scenario/1"
PAPER_SCENARIO = "paper.scenario.json"


class ScenarioError(ValueError):
    """Invalid scenario input; the message carries a location."""


@dataclass(frozen=True)
class LoopSpec:
    name: str
    curve: Curve
    deck: int = 0  # index into the deck group


@dataclass(frozen=True)
class Scenario:
    name: str
    dimension: int
    coordinates: tuple[str, ...]
    theta: FormMatrix
    metrics: tuple[BilinearForm, ...] = ()
    deck_group: tuple[ExactMatrix, ...] = ()
    forbidden: tuple[tuple[Scalar, ...], ...] = ()
    loops: tuple[LoopSpec, ...] = ()
    expected: tuple[dict, ...] = field(default=())

    def metric(self, name: str) -> BilinearForm:
        for g in self.metrics:
            if g.name == name:
                return g
        raise KeyError(f"no metric named {name!r}")

    def loop(self, name: str) -> LoopSpec:
        for lp in self.loops:
            if lp.name == name:
                return lp
        raise KeyError(f"no loop named {name!r}")

    def quotient_loop(self, spec: LoopSpec | str) -> QuotientLoop:
        if isinstance(spec, str):
            spec = self.loop(spec)
        return QuotientLoop(spec.curve, self.deck_group[spec.deck], self.forbidden, spec.name)

    def nontrivial_deck(self) -> ExactMatrix | None:
        ident = ExactMatrix.identity(self.dimension)
        return next((h for h in self.deck_group if h != ident), None)


# -- decoding ------------------------------------------------------------------


def _scalar(x: Any, where: str) -> Scalar:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise ScenarioError(f"{where}: scalars must be strings like \"1-√2\" or integers, got {x!r}")
    try:
        return Scalar.coerce(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _matrix(x: Any, n: int, where: str) -> ExactMatrix:
    if not isinstance(x, list) or len(x) != n or any(not isinstance(r, list) or len(r) != n for r in x):
        raise ScenarioError(f"{where}: expected a {n}x{n} matrix")
    return ExactMatrix([[_scalar(v, f"{where}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(x)])


def _poly(x: Any, variables: tuple[str, ...], where: str) -> Poly:
    if not isinstance(x, dict):
        raise ScenarioError(f"{where}: polynomials are objects mapping exponents to coefficients")
    terms = {}
    for key, c in x.items():
        try:
            exps = tuple(int(e) for e in str(key).split(","))
        except ValueError:
            raise ScenarioError(f"{where}: bad exponent key {key!r}") from None
        if len(exps) != len(variables) or any(e < 0 for e in exps):
            raise ScenarioError(f"{where}: exponent key {key!r} needs {len(variables)} nonnegative entries")
        terms[exps] = _scalar(c, f"{where}[{key!r}]")
    return Poly(variables, terms)


def _one_form(x: Any, coords: tuple[str, ...], where: str) -> PolyForm:
    if not isinstance(x, dict):
        raise ScenarioError(f"{where}: 1-forms are objects like {{\"dx1\": {{...}}}}")
    comps = {}
    names = {f"d{c}": k for k, c in enumerate(coords)}
    for key, p in x.items():
        if key not in names:
            raise ScenarioError(f"{where}: unknown differential {key!r}")
        comps[(names[key],)] = _poly(p, coords, f"{where}.{key}")
    return PolyForm(coords, 1, comps)


def _require(obj: dict, key: str, where: str = "scenario"):
    if key not in obj:
        raise ScenarioError(f"{where}: missing field {key!r}")
    return obj[key]


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario: top level must be an object")
    fmt = doc.get("format", FORMAT_TAG)
    if fmt != FORMAT_TAG:
        raise ScenarioError(f"scenario.format: unsupported format {fmt!r}")
    n = _require(doc, "dimension")
    if not isinstance(n, int) or n < 1:
        raise ScenarioError("scenario.dimension: must be a positive integer")
    coords = tuple(doc.get("coordinates") or [f"x{i}" for i in range(1, n + 1)])
    if len(coords) != n or len(set(coords)) != n:
        raise ScenarioError(f"scenario.coordinates: need {n} distinct names")

    raw_theta = _require(doc, "theta")
    if not isinstance(raw_theta, list) or len(raw_theta) != n:
        raise ScenarioError(f"scenario.theta: dimension mismatch, expected {n} rows")
    rows = []
    for i, r in enumerate(raw_theta):
        if not isinstance(r, list) or len(r) != n:
            raise ScenarioError(f"scenario.theta[{i}]: dimension mismatch, expected {n} entries")
        rows.append([_one_form(e, coords, f"scenario.theta[{i}][{j}]") for j, e in enumerate(r)])
    theta = FormMatrix(rows)

    metrics = []
    for k, m in enumerate(doc.get("metrics", [])):
        where = f"scenario.metrics[{k}]"
        mat = _matrix(_require(m, "matrix", where), n, f"{where}.matrix")
        if not mat.is_symmetric():
            raise ScenarioError(f"{where}: metric matrix is not symmetric")
        try:
            metrics.append(BilinearForm(mat, m.get("name", f"g{k + 1}")))
        except DegenerateFormError as exc:
            raise ScenarioError(f"{where}: degenerate metric ({exc})") from None

    deck = [_matrix(h, n, f"scenario.deck_group[{k}]") for k, h in enumerate(doc.get("deck_group", []))]
    if not deck:
        deck = [ExactMatrix.identity(n)]
    for k, h in enumerate(deck):
        try:
            mat_inverse(h)
        except SingularMatrixError:
            raise ScenarioError(f"scenario.deck_group[{k}]: singular matrix") from None
    members = set(deck)
    for a in deck:
        for b in deck:
            if a @ b not in members:
                raise ScenarioError("scenario.deck_group: not closed under multiplication")

    forbidden = []
    for k, ell in enumerate(doc.get("forbidden_subspace", [])):
        if not isinstance(ell, list) or len(ell) != n:
            raise ScenarioError(f"scenario.forbidden_subspace[{k}]: expected {n} coefficients")
        forbidden.append(tuple(_scalar(v, f"scenario.forbidden_subspace[{k}][{j}]") for j, v in enumerate(ell)))

    loops = []
    for k, lp in enumerate(doc.get("loops", [])):
        where = f"scenario.loops[{k}]"
        comps = _require(lp, "curve", where)
        if not isinstance(comps, list) or len(comps) != n:
            raise ScenarioError(f"{where}.curve: dimension mismatch, expected {n} components")
        curve = Curve(tuple(_poly(c, T_VARS, f"{where}.curve[{j}]") for j, c in enumerate(comps)))
        d = lp.get("deck", 0)
        if not isinstance(d, int) or not 0 <= d < len(deck):
            raise ScenarioError(f"{where}.deck: index {d!r} out of range")
        loops.append(LoopSpec(lp.get("name", f"loop{k + 1}"), curve, d))

    expected = doc.get("expected", [])
    if not isinstance(expected, list) or any(not isinstance(e, dict) or "check" not in e for e in expected):
        raise ScenarioError("scenario.expected: must be a list of objects with a \"check\" field")

    return Scenario(
        name=str(doc.get("name", "scenario")),
        dimension=n,
        coordinates=coords,
        theta=theta,
        metrics=tuple(metrics),
        deck_group=tuple(deck),
        forbidden=tuple(forbidden),
        loops=tuple(loops),
        expected=tuple(expected),
    )


def loads_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return scenario_from_dict(doc)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror}") from None
    return loads_scenario(text, str(path))


def load_paper_scenario() -> Scenario:
    text = resources.files("paraholo.data").joinpath(PAPER_SCENARIO).read_text(encoding="utf-8")
    return loads_scenario(text, PAPER_SCENARIO)


# -- encoding ------------------------------------------------------------------


def _poly_doc(p: Poly) -> dict:
    return {",".join(str(e) for e in exps): str(c) for exps, c in p.items()}


def _matrix_doc(m: ExactMatrix) -> list:
    return m.to_strings()


def scenario_to_dict(s: Scenario) -> dict:
    theta = []
    for r in s.theta.entries:
        row = []
        for f in r:
            row.append({f"d{s.coordinates[k]}": _poly_doc(c) for (k,), c in sorted(f.components.items())})
        theta.append(row)
    return {
        "format": FORMAT_TAG,
        "name": s.name,
        "dimension": s.dimension,
        "coordinates": list(s.coordinates),
        "theta": theta,
        "metrics": [{"name": g.name, "matrix": _matrix_doc(g.matrix)} for g in s.metrics],
        "deck_group": [_matrix_doc(h) for h in s.deck_group],
        "forbidden_subspace": [[str(x) for x in ell] for ell in s.forbidden],
        "loops": [{"name": lp.name, "curve": [_poly_doc(c) for c in lp.curve.components], "deck": lp.deck}
                  for lp in s.loops],
        "expected": [dict(e) for e in s.expected],
    }


def dumps_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2, ensure_ascii=False) + "\n"


def save_scenario(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(dumps_scenario(s), encoding="utf-8")
