from __future__ import annotations

import copy
import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraholo.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from paraholo.connection import FormMatrix
from paraholo.exact import ExactMatrix, Scalar, coordinate_ring
from paraholo.forms import BilinearForm
from paraholo.paper import forbidden_functionals, g_matrix, gamma_components, k_form, l_form, theta
from paraholo.scenario import (
    LoopSpec,
    Scenario,
    ScenarioError,
    dumps_scenario,
    load_paper_scenario,
    load_scenario,
    loads_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from paraholo.transport import Curve
from paraholo.verify import PaperData, expected_report, run_paper_verification
from strategies import one_forms, polys, small_scalars


def paper_doc() -> dict:
    return scenario_to_dict(load_paper_scenario())


def test_bundled_scenario_matches_constructions():
    s = load_paper_scenario()
    assert s.name == "paper" and s.dimension == 4
    assert s.theta == theta()
    assert s.metric("K").matrix == k_form() and s.metric("L").matrix == l_form()
    assert s.deck_group == (ExactMatrix.identity(4), g_matrix())
    assert s.forbidden == tuple(forbidden_functionals())
    assert s.loop("gamma").curve == Curve(tuple(gamma_components()))
    assert s.nontrivial_deck() == g_matrix()
    ql = s.quotient_loop("gamma")
    assert ql.deck == g_matrix() and ql.name == "gamma"
    with pytest.raises(KeyError):
        s.metric("M")


def test_minimal_scenario_defaults():
    s = scenario_from_dict({"dimension": 2, "theta": [[{}, {}], [{}, {}]]})
    assert s.metrics == () and s.loops == () and s.expected == ()
    assert s.deck_group == (ExactMatrix.identity(2),)
    assert s.coordinates == ("x1", "x2")
    assert s.nontrivial_deck() is None


@pytest.mark.parametrize("mutate, fragment", [
    (lambda d: d.update(theta=d["theta"][:3]), "scenario.theta: dimension mismatch"),
    (lambda d: d["theta"][1].pop(), "scenario.theta[1]: dimension mismatch"),
    (lambda d: d["metrics"][0]["matrix"][0].__setitem__(1, "1"), "not symmetric"),
    (lambda d: d["metrics"][1].update(matrix=[["0"] * 4 for _ in range(4)]), "degenerate metric"),
    (lambda d: d["deck_group"].pop(0), "not closed under multiplication"),
    (lambda d: d["deck_group"].append([["0"] * 4 for _ in range(4)]), "singular matrix"),
    (lambda d: d["forbidden_subspace"].append(["1"]), "forbidden_subspace[2]"),
    (lambda d: d["loops"][0].update(deck=5), "out of range"),
    (lambda d: d["loops"][0]["curve"].pop(), "loops[0].curve: dimension mismatch"),
    (lambda d: d["theta"][0][1].update(dy={}), "unknown differential"),
    (lambda d: d["theta"][0][1]["dx1"].update({"1,0": "1"}), "needs 4 nonnegative entries"),
    (lambda d: d["metrics"][0]["matrix"][0].__setitem__(0, 1.5), "scalars must be strings"),
    (lambda d: d["metrics"][0]["matrix"][0].__setitem__(0, "1+"), "metrics[0].matrix[0][0]"),
    (lambda d: d.update(expected=[{"metric": "K"}]), "\"check\" field"),
    (lambda d: d.update(format="other/2"), "unsupported format"),
    (lambda d: d.pop("dimension"), "missing field 'dimension'"),
])
def test_invalid_scenarios(mutate, fragment):
    doc = paper_doc()
    mutate(doc)
    with pytest.raises(ScenarioError) as info:
        scenario_from_dict(doc)
    assert fragment in str(info.value)


def test_parse_error_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "dimension": 2,,\n}\n', encoding="utf-8")
    with pytest.raises(ScenarioError) as info:
        load_scenario(path)
    assert str(info.value).startswith(f"{path}:2:")
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "missing.json")


def test_save_and_load(tmp_path):
    s = load_paper_scenario()
    path = tmp_path / "paper.json"
    save_scenario(s, path)
    assert load_scenario(path) == s
    assert path.read_text(encoding="utf-8") == dumps_scenario(s)


@st.composite
def scenarios(draw):
    n = 2
    chart = coordinate_ring(n)
    th = FormMatrix([[draw(one_forms(n=n, max_degree=2)) for _ in range(n)] for _ in range(n)])
    a, b, c = draw(small_scalars), draw(small_scalars), draw(small_scalars)
    mat = ExactMatrix([[a, b], [b, c]])
    metrics = (BilinearForm(mat, "g"),) if mat.det() else ()
    t_polys = polys(("t",), 3, 3)
    loops = tuple(LoopSpec(f"c{k}", Curve((draw(t_polys), draw(t_polys))), 0) for k in range(draw(st.integers(0, 2))))
    forbidden = tuple(tuple(draw(small_scalars) for _ in range(n)) for _ in range(draw(st.integers(0, 1))))
    return Scenario("random", n, chart, th, metrics, (ExactMatrix.identity(n),), forbidden, loops,
                    ({"check": "flat_wedge", "value": True},))


@given(scenarios())
@settings(max_examples=100)
def test_round_trip(s):
    text = dumps_scenario(s)
    back = loads_scenario(text)
    assert back == s
    assert dumps_scenario(back) == text


def test_expected_report_one_record_per_assertion():
    s = load_paper_scenario()
    rep = expected_report(s)
    assert len(rep.checks) == len(s.expected) == 18
    assert rep.passed


def test_unknown_expectation_kind_fails():
    doc = paper_doc()
    doc["expected"] = [{"check": "signature", "metric": "K", "value": [2, 2]}, {"check": "no-such-kind"}]
    rep = expected_report(scenario_from_dict(doc))
    assert [c.status for c in rep.checks] == ["pass", "fail"]
    assert "unknown check kind" in rep.checks[1].error
    assert not rep.passed


def test_wrong_expectation_fails():
    doc = paper_doc()
    doc["expected"] = [{"check": "signature", "metric": "K", "value": [3, 1]}]
    rep = expected_report(scenario_from_dict(doc))
    assert rep.overall == "FAIL"
    assert rep.checks[0].values == {"signature": (2, 2)}


# -- reports and the command line -------------------------------------------------


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_paper_json(capsys):
    code, out, _ = run_cli(capsys, "verify-paper")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["overall"] == "PASS" and doc["counts"]["fail"] == 0
    assert doc["command"] == "verify-paper" and doc["scenario"] == "paper"
    assert len(doc["checks"]) == 23
    assert all(c["claim"] for c in doc["checks"])
    assert set(doc["versions"]) >= {"paraholo", "python", "numpy"}


def test_reports_are_deterministic(capsys):
    first = run_cli(capsys, "verify-paper")[1]
    second = run_cli(capsys, "verify-paper")[1]
    assert first == second


def test_exact_checks_do_not_depend_on_tolerance():
    loose = run_paper_verification(tol=1e-6).to_dict()
    tight = run_paper_verification(tol=1e-12).to_dict()
    for a, b in zip(loose["checks"], tight["checks"]):
        if a["mode"] == "exact":
            assert (a["status"], a["values"]) == (b["status"], b["values"])


def test_perturbed_g_fails_with_residual():
    g = g_matrix()
    rows = [[g[i, j] for j in range(4)] for i in range(4)]
    rows[0][0] = rows[0][0] + Scalar(1) / 10
    rep = run_paper_verification(data=PaperData.default().with_g(ExactMatrix(rows)))
    assert rep.overall == "FAIL"
    rec = rep.check("G^2 = I")
    assert rec.status == "fail"
    assert rec.to_dict()["values"]["residual"] == {"(1,1)": "1/100+1/5√2", "(1,4)": "1/10", "(4,1)": "-1/10"}
    # the perturbation also breaks the block pattern, since (1,1) != (3,3) now
    assert rep.check("G in F").status == "fail"
    assert rep.check("char_poly(G)").status == "fail"


@pytest.mark.parametrize("command", ["signature", "parallel-check", "transport", "holonomy",
                                     "irreducibility", "pencil", "check"])
def test_scenario_commands_pass_on_bundled_example(capsys, command):
    code, out, _ = run_cli(capsys, command)
    assert code == EXIT_OK, out
    assert json.loads(out)["command"] == command


def test_human_output(capsys):
    code, out, _ = run_cli(capsys, "signature", "--human")
    assert code == EXIT_OK
    assert out.startswith("signature on paper: PASS")
    assert "0 failed" in out


def test_out_file(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "verify-paper", "--out", str(path))
    assert code == EXIT_OK and out == ""
    assert json.loads(path.read_text(encoding="utf-8"))["overall"] == "PASS"


def test_failing_scenario_exit_code(capsys, tmp_path):
    doc = paper_doc()
    doc["expected"] = [{"check": "algebra_dim", "value": 16}]
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, out, _ = run_cli(capsys, "check", "--scenario", str(path))
    assert code == EXIT_FAIL
    assert json.loads(out)["overall"] == "FAIL"


def test_verify_paper_on_scenario_file(capsys, tmp_path):
    path = tmp_path / "s.json"
    save_scenario(load_paper_scenario(), path)
    code, out, _ = run_cli(capsys, "verify-paper", "--scenario", str(path))
    assert code == EXIT_OK


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\n\n  oops", encoding="utf-8")
    code, _, err = run_cli(capsys, "holonomy", "--scenario", str(bad))
    assert code == EXIT_INPUT and f"{bad}:3:" in err
    assert run_cli(capsys, "frobnicate")[0] == EXIT_INPUT
    assert run_cli(capsys, "verify-paper", "--tol", "-1")[0] == EXIT_INPUT
    doc = copy.deepcopy(paper_doc())
    doc["theta"] = doc["theta"][:3]
    bad.write_text(json.dumps(doc), encoding="utf-8")
    code, _, err = run_cli(capsys, "signature", "--scenario", str(bad))
    assert code == EXIT_INPUT and "dimension mismatch" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "paraholo", "verify-paper", "--human"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "23 passed, 0 failed" in proc.stdout
