import json

import pytest
from click.testing import CliRunner

from banach_constants.cli import main, run_cli
from banach_constants.models.models import IdentityReport, SpaceSpec

FAST = ["--restarts", "4", "--resolution", "64", "--direct-resolution", "64"]


@pytest.fixture
def runner():
    return CliRunner()


def test_list_constants(runner):
    result = runner.invoke(main, ["list-constants", "--format", "json"])
    assert result.exit_code == 0
    constants = json.loads(result.output)
    assert len(constants) == 14
    assert "l-yj-i" in [c["name"] for c in constants]


def test_list_spaces(runner):
    result = runner.invoke(main, ["list-spaces"])
    assert result.exit_code == 0
    assert "octagon" in result.output
    assert "random-polyhedral" in result.output


def test_constant_json(runner):
    result = runner.invoke(
        main,
        ["constant", "--space", "lp:1:2", "--name", "l-yj-i", "--tau", "1", "--upsilon", "2", "--format", "json"]
        + FAST,
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert sorted(payload) == ["estimate", "identities", "query", "space"]
    assert payload["query"]["id"] == "L_YJ_I"
    assert payload["estimate"]["value"] == pytest.approx(4.5, abs=1e-6)
    assert payload["estimate"]["cert"] == "heuristic-lower-bound"
    assert len(payload["estimate"]["witness"]["x"]) == 2


def test_constant_table_shows_the_witness(runner):
    result = runner.invoke(main, ["constant", "--space", "l2", "--name", "c-nj-prime"] + FAST)
    assert result.exit_code == 0, result.output
    assert "C_NJ_prime" in result.output
    assert "witness x:" in result.output


def test_constant_csv(runner, tmp_path):
    out = tmp_path / "estimate.csv"
    result = runner.invoke(
        main,
        ["constant", "--space", "l1", "--name", "e", "--t", "1", "--format", "csv", "--out", str(out)] + FAST,
    )
    assert result.exit_code == 0, result.output
    header, row = out.read_text(encoding="utf-8").splitlines()
    assert header.split(",")[:8] == ["space", "constant", "tau", "upsilon", "t", "eps", "mode", "value"]
    assert row.split(",")[1] == "E"
    assert float(row.split(",")[7]) == pytest.approx(8.0, abs=1e-9)


def test_invalid_space_exits_with_usage_error(runner):
    result = runner.invoke(main, ["constant", "--space", "lp:0.5:2", "--name", "a2"])
    assert result.exit_code == 2
    assert "p must be ≥ 1" in result.output


def test_missing_parameter_exits_with_usage_error(runner):
    result = runner.invoke(main, ["constant", "--space", "l2", "--name", "l-yj-i", "--tau", "1"] + FAST)
    assert result.exit_code == 2
    assert "upsilon is required" in result.output


def test_direct_mode_flag(runner):
    result = runner.invoke(
        main, ["constant", "--space", "l2", "--name", "a2", "--mode", "direct"] + FAST
    )
    assert result.exit_code == 2


def test_degenerate_estimate_exits_with_three(runner):
    result = runner.invoke(
        main, ["constant", "--space", '{"family": "lp", "p": 2, "dim": 1}', "--name", "delta-x", "--eps", "1"]
    )
    assert result.exit_code == 3


def test_run_cli_exit_codes():
    assert run_cli(["list-constants"]) == 0
    assert run_cli(["constant", "--space", "lp:0.5:2", "--name", "a2"]) == 2
    assert run_cli(["no-such-command"]) == 2


def test_verify_is_reproducible(runner, tmp_path):
    outputs = []
    for name in ("first.json", "second.json"):
        out = tmp_path / name
        result = runner.invoke(
            main,
            ["verify", "--spaces", "l2", "--suite", "core", "--seed", "42", "--format", "json", "--out", str(out)]
            + FAST,
        )
        assert result.exit_code == 0, result.output
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    payload = json.loads(outputs[0])
    assert payload["query"] == {"suite": "core"}
    assert {report["status"] for report in payload["identities"]} == {"pass"}
    assert all("lhs_cert" in report and "rhs_cert" in report for report in payload["identities"])


def test_verify_exits_with_one_on_a_failed_identity(runner, monkeypatch):
    def failing(spaces, suite, cfg, tol):
        return [
            IdentityReport(
                identity_id="BD-H", space=SpaceSpec.lp(2, 2), lhs=3.0, rhs=[1.0, 2.0], tol=1e-3, status="fail"
            )
        ]

    monkeypatch.setattr("banach_constants.cli.run_suite", failing)
    result = runner.invoke(main, ["verify", "--spaces", "l2"])
    assert result.exit_code == 1
    assert "0 passed, 1 failed" in result.output


def test_verify_csv(runner, monkeypatch):
    def passing(spaces, suite, cfg, tol):
        return [IdentityReport(identity_id="HIL-1", space=spaces[0], lhs=1.0, rhs=1.0, tol=1e-3, status="pass")]

    monkeypatch.setattr("banach_constants.cli.run_suite", passing)
    result = runner.invoke(main, ["verify", "--spaces", "l2", "--format", "csv"])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "identity_id,space,params,lhs,rhs,tol,status,notes"
    assert lines[1].startswith("HIL-1,l2,{},1.0,1.0,0.001,pass")


def test_report_csv(runner):
    result = runner.invoke(
        main,
        ["report", "--spaces", "l2", "--format", "csv", "--restarts", "1", "--max-iters", "20", "--resolution", "16",
         "--direct-resolution", "16"],
    )
    assert result.exit_code == 0, result.output
    rows = result.output.splitlines()
    assert len(rows) == 1 + 14
