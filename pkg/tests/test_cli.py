from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from reach_bounds.cli import cli, main
from reach_bounds.config import Settings
from reach_bounds.workflows import AnalysisWorkflow


@pytest.fixture
def invoke():
    runner = CliRunner()

    def run(*args: str):
        return runner.invoke(cli, list(args), obj=AnalysisWorkflow(Settings(_env_file=None)))

    return run


def test_analyze_prints_json_summary(invoke, fixture_path) -> None:
    result = invoke("analyze", str(fixture_path("packet_receiver")), "--heuristic", "mass", "--widen-key", "var:ctr", "--json")
    assert result.exit_code == 0, result.output
    summary = json.loads(result.output)
    assert {"query", "lower", "upper", "rounds", "game_nodes_max", "time_ms", "status"} <= set(summary)
    assert summary["upper"] == pytest.approx(0.01, abs=1e-6)


def test_analyze_prints_a_table_by_default(invoke, fixture_path) -> None:
    result = invoke("analyze", str(fixture_path("packet_receiver")))
    assert result.exit_code == 0, result.output
    assert result.output.splitlines()[0].split() == ["query", "lower", "upper"]
    assert "status: converged" in result.output


def test_unconverged_runs_exit_with_two(invoke, fixture_path) -> None:
    result = invoke(
        "analyze",
        str(fixture_path("packet_receiver")),
        "--heuristic",
        "mass",
        "--widen-key",
        "var:ctr",
        "--max-rounds",
        "1",
        "--json",
    )
    assert result.exit_code == 2
    assert json.loads(result.output)["status"] == "budget-exhausted"


def test_emit_game_writes_dot(invoke, fixture_path, tmp_path) -> None:
    target = tmp_path / "packet_receiver.dot"
    result = invoke("analyze", str(fixture_path("one_shot")), "--emit-game", str(target))
    assert result.exit_code == 0, result.output
    assert target.read_text(encoding="utf-8").startswith("digraph")
    assert f"game: {target}" in result.output


def test_concrete_command(invoke, fixture_path) -> None:
    result = invoke("concrete", str(fixture_path("packet_receiver")))
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["max"] == pytest.approx(0.01, abs=1e-6)
    assert payload["configurations"] == 302


def test_audit_command(invoke, fixture_path) -> None:
    result = invoke("audit", str(fixture_path("packet_receiver_clipped")), "--widen-key", "var:ctr", "--depth", "0")
    assert result.exit_code == 0, result.output
    assert result.output.strip().startswith("valid: 7 player-1 nodes")


@pytest.mark.parametrize(
    "text",
    [
        "int x = 0;\nA: (x < 1) -> 1:(x' = x * x);\nreach: x = 1\n",
        "int x = 0;\nA: true -> 1:(x' = 1);\nreach: x = 0\n",
        "int x = 0;\nA: (x < 1) -> 1/0:(x' = 1);\nreach: x = 1\n",
        "int x = 0;\nA: (x < 1) -> 0.5/2:(x' = 1);\nreach: x = 1\n",
    ],
)
def test_rejected_programs_exit_with_one(invoke, tmp_path, text) -> None:
    source = tmp_path / "bad.npp"
    source.write_text(text, encoding="utf-8")
    result = invoke("analyze", str(source))
    assert result.exit_code == 1
    assert "error:" in result.output


def test_missing_input_and_bad_options_exit_with_one(invoke, fixture_path, tmp_path) -> None:
    assert invoke("analyze", str(tmp_path / "absent.npp")).exit_code == 1
    result = invoke("analyze", str(fixture_path("packet_receiver")), "--widen-key", "loop")
    assert result.exit_code == 1
    assert "widen key" in result.output.lower()


def test_main_returns_exit_codes(fixture_path) -> None:
    assert main(["concrete", str(fixture_path("one_shot"))]) == 0
    assert main(["analyze", "--domain", "octagon", str(fixture_path("one_shot"))]) == 1
