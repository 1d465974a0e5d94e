import csv
import json
import logging

import pytest

from cli import EXIT_FAIL, EXIT_INTERNAL, EXIT_PASS, EXIT_USAGE, build_parser, config_from_args, main, parse_coeff_list, run
from lab.config import RunConfig


@pytest.fixture(autouse=True)
def _restore_logging():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def _report(capsys):
    return json.loads(capsys.readouterr().out)


def test_witness_json(capsys):
    assert main(["witness", "--k", "3", "--workers", "1"]) == EXIT_PASS
    doc = _report(capsys)
    witness = doc["report"]["witness"]
    assert (witness["m"], witness["n"], witness["x"], witness["y"], witness["z"]) == ("2", "2", "23", "349", "1047")
    assert doc["config"]["k"] == "3"
    assert doc["version"]
    assert set(doc["timings"]) == {"witness", "threshold"}
    assert doc["passed"] is True


def test_special_points_run(capsys):
    assert main(["verify-lemmas", "--k", "2", "--lemma", "special-points", "--workers", "1"]) == EXIT_PASS
    doc = _report(capsys)
    report = doc["report"]["special-points"]
    assert report["jTested"] == "2"
    assert report["jFailed"] == []
    assert report["decompositionFailed"] == []


@pytest.mark.parametrize(
    "number, names",
    [
        ("2.2", {"shift-invariance"}),
        ("2.3", {"special-points"}),
        ("2.4", {"lower-powers:r=1"}),
    ],
)
def test_numbered_lemma_names(capsys, number, names):
    argv = ["verify-lemmas", "--k", "2", "--lemma", number, "--workers", "1"]
    argv += ["--full-range-limit", "65536", "--sample-budget", "2048"]
    assert main(argv) == EXIT_PASS
    doc = _report(capsys)
    assert set(doc["report"]) - {"witness"} == names
    assert doc["config"]["lemma"] == number


def test_unknown_lemma_is_rejected_by_the_parser():
    with pytest.raises(SystemExit) as info:
        main(["verify-lemmas", "--k", "2", "--lemma", "2.5"])
    assert info.value.code == EXIT_USAGE


def test_integer_beta_residual(capsys):
    code = main(
        ["residual", "--k", "2", "--field", "2", "--coeffs", "0,1", "--N", "12", "--below-threshold", "--workers", "1"]
    )
    doc = _report(capsys)
    assert doc["report"]["residual"]["belowThreshold"] is True
    assert doc["report"]["residual"]["route"] == "full"
    assert doc["report"]["residual"]["checks"]["specialPoints"] is True
    assert code == EXIT_PASS
    assert doc["passed"] is True


def test_below_threshold_without_flag_is_usage_error(capsys):
    assert main(["residual", "--k", "2", "--field", "golden", "--N", "12", "--workers", "1"]) == EXIT_USAGE
    assert "below the threshold" in capsys.readouterr().err


def test_failed_check_exits_one(capsys):
    assert main(["witness", "--k", "2", "--N", "14"]) == EXIT_FAIL
    assert _report(capsys)["passed"] is False


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as info:
        main(["residual", "--k", "2"])
    assert info.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["stats", "entropy"])
    assert info.value.code == EXIT_USAGE


def test_zero_denominator_is_a_usage_error(capsys):
    assert main(["stats", "affine", "--q1", "1/0", "--workers", "1"]) == EXIT_USAGE
    assert "Bad rational for q1" in capsys.readouterr().err


def test_internal_violation_exits_three(monkeypatch, capsys):
    import orchestrator.workflow as workflow

    monkeypatch.setattr(workflow, "validate_witness", lambda w: ["congruences"])
    assert main(["witness", "--k", "2"]) == EXIT_INTERNAL
    assert "InvariantViolation" in capsys.readouterr().err


def test_stats_csv_output(tmp_path):
    target = tmp_path / "complexity.csv"
    code = main(["stats", "complexity", "--m", "6", "--prefix", "4096", "--format", "csv", "--output", str(target)])
    assert code == EXIT_PASS
    with target.open() as f:
        rows = list(csv.DictReader(f))
    assert [row["m"] for row in rows] == ["1", "2", "3", "4", "5", "6"]
    assert set(rows[0]) == {"m", "count", "bound", "margin"}


def test_csv_needs_a_table(capsys):
    config = RunConfig(subcommand="witness", k=2, output_format="csv", workers=1)
    assert run(config) == EXIT_USAGE


def test_deterministic_reports(tmp_path):
    outputs = []
    for name in ("a.json", "b.json"):
        target = tmp_path / name
        main(["stats", "frequencies", "--k", "2", "--m", "2", "--prefix", "2048", "--output", str(target)])
        doc = json.loads(target.read_text())
        doc.pop("timings")
        doc["config"].pop("output_path")
        outputs.append(doc)
    assert outputs[0] == outputs[1]


def test_beta_expand_and_norm_audit(capsys):
    assert main(["beta-expand", "--field", "golden", "--num=-1,1", "--digits", "4"]) == EXIT_PASS
    doc = _report(capsys)
    assert doc["report"]["beta-expand"]["digits"] == ["1", "0", "0", "0"]
    assert main(["norm-audit", "--k", "2", "--field", "golden", "--coeffs", "0,1", "--workers", "1"]) == EXIT_PASS
    doc = _report(capsys)
    assert doc["report"]["norm-audit"]["xiCoords"] == ["10", "10"]


def test_coefficient_parsing():
    assert parse_coeff_list("0,1") == [[0], [1]]
    assert parse_coeff_list("1:2, -3") == [[1, 2], [-3]]
    args = build_parser().parse_args(["residual", "--k", "2", "--field", "golden", "--coeffs", "0,1:1"])
    config = config_from_args(args)
    assert config.coeffs == [[0], [1, 1]]
    assert config.field_poly == "golden"
    assert config.budgets.term_budget == 1 << 16
