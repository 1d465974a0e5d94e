import logging

import pytest

from lab.config import Budgets, RunConfig
from orchestrator.workflow import AuditLogger, WorkflowDAG, build_run, task_json, task_passed
from witness.congruence import InvariantViolation


def test_dag_runs_tasks_in_order_and_times_them():
    logger = AuditLogger()
    dag = WorkflowDAG(logger)
    dag.add_task("first", lambda: 1)
    dag.add_task("second", lambda: {"passed": False})
    results = dag.run()
    assert [name for name, _ in results] == ["first", "second"]
    assert logger.entries == ["executed:first", "executed:second"]
    assert set(dag.timings) == {"first", "second"}
    assert not task_passed(results[1][1])


def test_audit_logger_forwards_to_logging(caplog):
    with caplog.at_level(logging.INFO, logger="tmlab"):
        AuditLogger().log("executed:witness")
    assert "executed:witness" in caplog.text


def test_witness_run():
    dag, logger = build_run(RunConfig(subcommand="witness", k=3, N=41, workers=1))
    results = dict(dag.run())
    assert results["witness"].y == 349
    assert results["threshold"]["minValidN"] == "41"
    assert results["threshold"]["passed"] is True
    assert logger.entries == ["executed:witness", "executed:threshold"]


def test_lemma_run_logs_sweeps():
    config = RunConfig(
        subcommand="verify-lemmas", k=2, workers=1, budgets=Budgets(full_range_limit=1 << 16, sample_budget=2048)
    )
    dag, logger = build_run(config)
    results = dag.run()
    assert [name for name, _ in results] == ["witness", "shift-invariance", "special-points", "lower-powers:r=1"]
    assert all(task_passed(output) for _, output in results)
    assert "sweep:special-points tested=2 failed=0" in logger.entries


def test_residual_run_below_threshold_includes_oracle():
    config = RunConfig(
        subcommand="residual", k=2, N=4, field_poly="two", coeffs=[[0], [1]], below_threshold=True, workers=1
    )
    dag, _ = build_run(config)
    results = dict(dag.run())
    assert results["field"]["classification"] == "rational-integer"
    assert results["residual"].below_threshold
    assert results["oracle"].passed
    assert task_json(results["oracle"])["exactAgreement"] is True


def test_residual_run_skips_oracle_when_p_is_too_long():
    config = RunConfig(subcommand="residual", k=2, N=15, field_poly="golden", workers=1)
    dag, _ = build_run(config)
    results = dict(dag.run())
    assert "skipped" in results["oracle"]
    assert results["residual"].passed


def test_stats_and_expansion_runs():
    dag, _ = build_run(RunConfig(subcommand="stats", stats_kind="cubefree", prefix_len=1000))
    assert dict(dag.run())["cubefree"].cube_free
    dag, _ = build_run(RunConfig(subcommand="beta-expand", field_poly="two", num=[1], den=3, digits=8))
    out = dict(dag.run())["beta-expand"]
    assert out["period"] == "2"
    assert out["reconstructs"] is True


def test_build_run_usage_errors():
    with pytest.raises(ValueError, match="needs --k"):
        build_run(RunConfig(subcommand="residual", field_poly="golden"))
    with pytest.raises(ValueError, match="Unknown lemma"):
        build_run(RunConfig(subcommand="verify-lemmas", k=2, lemma="2.5"))
    with pytest.raises(ValueError, match="Unknown subcommand"):
        build_run(RunConfig(subcommand="prove"))
    with pytest.raises(ValueError, match="Budgets must be positive"):
        build_run(RunConfig(subcommand="witness", k=2, budgets=Budgets(term_budget=0)))


def test_witness_violation_surfaces(monkeypatch):
    import orchestrator.workflow as workflow

    monkeypatch.setattr(workflow, "check_tm_identities", lambda w: False)
    dag, _ = build_run(RunConfig(subcommand="witness", k=2))
    with pytest.raises(InvariantViolation):
        dag.run()
