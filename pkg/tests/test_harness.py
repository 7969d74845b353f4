import json

import numpy as np
import pytest

from cotanlift.harness import (
    ANCHORS,
    ScenarioError,
    UsageError,
    bundled_scenarios,
    emit_report,
    load_scenario,
    parse_scenario,
    run_suites,
)
from cotanlift.harness.cli import main
from cotanlift.harness.scenario import SUITES
from cotanlift.harness.suites import SampleSet
from cotanlift.structure import Connection

MINIMAL = {"name": "tiny", "dimension": 2, "suites": ["lift_identity"], "samples": 8, "seed": 3}


def small(name, samples=12):
    s = load_scenario(name)
    s.samples = samples
    return s


def test_minimal_document_parses():
    s = parse_scenario(MINIMAL)
    assert (s.n, s.samples, s.seed) == (2, 8, 3)
    assert s.connection_spec == {"type": "flat"}
    assert parse_scenario(json.dumps(MINIMAL)).name == "tiny"


@pytest.mark.parametrize(
    "doc, message",
    [
        ({"dimension": 3}, "dimension must be even"),
        ({"dimension": 2, "suites": ["nope"]}, "unknown suite"),
        ({"dimension": 2, "structure": {"type": "explicit", "components": {"k=1,l=1": 1, "k=2,l=2": 1}}}, "not almost complex"),
        ({"dimension": 2, "connection": {"type": "warp"}}, "unknown connection"),
        ({"dimension": 2, "map": {"type": "linear", "matrix": [[1, 1], [1, 1]]}}, "invertible"),
        ({"dimension": 2, "tolerances": {"bogus": 1}}, "unknown tolerance"),
        ({}, "missing 'dimension'"),
    ],
)
def test_invalid_documents(doc, message):
    with pytest.raises(ScenarioError, match=message):
        parse_scenario(doc)


def test_identity_structure_names_a_point():
    doc = {"dimension": 2, "structure": {"type": "explicit", "components": {"k=1,l=1": 1, "k=2,l=2": 1}}}
    with pytest.raises(ScenarioError, match=r"\["):
        parse_scenario(doc)


def test_bundled_catalogue():
    names = bundled_scenarios()
    assert {"flat_standard_n2", "torsion_gamma112_n2", "conjugated_n4_minimal", "sphere_n4"} <= set(names)
    with pytest.raises(ScenarioError):
        load_scenario("no_such_scenario")


def test_samples_are_deterministic():
    s = small("flat_standard_n2", 10)
    a, b = SampleSet.draw(s, "propimp"), SampleSet.draw(s, "propimp")
    np.testing.assert_array_equal(a.xs, b.xs)
    assert not a.xis[0].p.any()
    for xi in a.xis[1:4]:
        assert np.linalg.norm(xi.p) == pytest.approx(1.0)
    other = SampleSet.draw(s, "lemdist")
    assert not np.array_equal(a.xs, other.xs)


def test_flat_standard_passes():
    report = run_suites(small("flat_standard_n2"))
    assert report.passed and report.exit_code == 0
    ids = [c.id for c in report.checks]
    assert len(ids) == len(set(ids))
    assert all(c.anchor in ANCHORS for c in report.checks)
    assert all(c.id.split(".")[0] in SUITES for c in report.checks)


def test_torsion_scenario_expected_inequality():
    report = run_suites(small("torsion_gamma112_n2"), ["propimp"])
    assert report.passed
    check = {c.id: c for c in report.checks}["propimp.generalized_equals_horizontal"]
    assert check.note.startswith("EXPECTED-INEQUALITY")
    assert check.witness is not None and check.residual > 0.5


def test_minimal_three_way_agreement():
    report = run_suites(small("conjugated_n4_minimal", 8), ["propimp"])
    check = {c.id: c for c in report.checks}["propimp.minimal_three_way"]
    assert check.passed and check.residual <= 1e-9


def test_machine_report_layout():
    report = run_suites(small("flat_standard_n2", 6), ["lift_identity"])
    doc = json.loads(emit_report(report, "machine"))
    assert list(doc) == ["scenario", "overall", "expected", "summary", "metadata", "suites"]
    assert doc["summary"]["fail"] == 0 and doc["overall"] == "pass"
    assert set(doc["metadata"]) >= {"seed", "samples", "tolerances", "versions", "timestamp"}
    first = doc["suites"]["lift_identity"][0]
    assert list(first) == ["id", "anchor", "relation", "residual", "threshold", "pass", "witness", "note"]
    with pytest.raises(UsageError):
        emit_report(report, "xml")


def test_machine_report_is_reproducible():
    texts = [
        emit_report(run_suites(small("lambda_structure_n2", 6)), "machine", timestamp=False)
        for _ in range(2)
    ]
    assert texts[0] == texts[1]


def test_evaluation_error_is_reported_and_run_continues():
    s = small("flat_standard_n2", 10)

    def christoffel(x):
        if x[0] > 0.0:
            raise ArithmeticError("blown up")
        return np.zeros((2, 2, 2))

    s.connection = Connection(2, christoffel, "fragile")
    report = run_suites(s, ["lift_identity", "propimp"])
    bad = [c for c in report.checks if not c.passed]
    assert bad and report.exit_code == 1
    for c in bad:
        assert c.note.startswith("evaluation error") and c.residual == float("inf")
        assert c.witness[0] > 0.0
    assert any(c.passed for c in report.checks)
    doc = json.loads(emit_report(report, "machine"))
    assert doc["summary"]["fail"] == len(bad)


def test_cli_passing_run(capsys):
    code = main(["verify", "flat_standard_n2", "--samples", "8", "--suite", "lift_identity"])
    out = capsys.readouterr().out
    assert code == 0 and out.rstrip().endswith("PASS")


def test_cli_machine_format_and_env(capsys, monkeypatch):
    monkeypatch.setenv("COTANLIFT_FORMAT", "machine")
    monkeypatch.setenv("COTANLIFT_SUITES", "lift_identity,propimp")
    assert main(["verify", "flat_standard_n2", "--samples", "6", "--seed", "7"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert list(doc["suites"]) == ["lift_identity", "propimp"]
    assert doc["metadata"]["seed"] == 7 and doc["metadata"]["samples"] == 6


def test_cli_failure_has_witness(capsys):
    code = main(["verify", "lambda_structure_n2", "--samples", "8", "--suite", "lift_identity", "--tolerance", "1e-30"])
    out = capsys.readouterr().out
    assert code == 1
    assert "witness for" in out and out.rstrip().endswith("FAIL")


def test_cli_usage_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "flat_standard_n2", "--bogus"])
    assert exc.value.code == 2
    bad = tmp_path / "odd.json"
    bad.write_text(json.dumps({"dimension": 3}))
    assert main(["verify", str(bad)]) == 2
    assert "dimension must be even" in capsys.readouterr().err
    assert main(["verify", "flat_standard_n2", "--samples", "0"]) == 2


def test_cli_list(capsys):
    assert main(["list"]) == 0
    assert "sphere_n4" in capsys.readouterr().out.split()
