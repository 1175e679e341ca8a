from __future__ import annotations

import json

import pytest

from reach_bounds.config import AnalyzeConfig, Settings
from reach_bounds.core.errors import AnalysisConfigError, OracleInfeasibleError
from reach_bounds.core.game import WidenKey
from reach_bounds.workflows import AnalysisWorkflow


@pytest.fixture
def defaults() -> Settings:
    return Settings(_env_file=None)


async def test_analyze_writes_requested_artefacts(fixture_path, tmp_path, defaults) -> None:
    config = AnalyzeConfig.from_settings(
        fixture_path("packet_receiver"),
        defaults,
        heuristic="mass",
        widen_key="var:ctr",
        emit_game=tmp_path / "out" / "game.dot",
        dump_values=tmp_path / "out" / "values.json",
    )
    summary = await AnalysisWorkflow(defaults).analyze(config)

    assert summary["status"] == "converged"
    assert summary["rounds"] == 2
    assert summary["lower"] == pytest.approx(0.01, abs=1e-6)
    assert summary["upper"] == pytest.approx(0.01, abs=1e-6)
    assert summary["bounds"]["max"] == pytest.approx([0.01, 0.01], abs=1e-6)
    assert len(summary["history"]) == 2

    dot = (tmp_path / "out" / "game.dot").read_text(encoding="utf-8")
    assert dot.startswith("digraph")
    dump = json.loads((tmp_path / "out" / "values.json").read_text(encoding="utf-8"))
    assert set(dump) == {"++", "+-"}
    assert summary["files"] == {
        "game": str(tmp_path / "out" / "game.dot"),
        "values": str(tmp_path / "out" / "values.json"),
    }


async def test_both_query_reports_two_bound_pairs(fixture_path, defaults) -> None:
    config = AnalyzeConfig.from_settings(fixture_path("one_shot"), defaults, query="both")
    summary = await AnalysisWorkflow(defaults).analyze(config)
    assert set(summary["bounds"]) == {"max", "min"}
    assert "lower" not in summary
    assert "files" not in summary


async def test_concrete_values_for_packet_receiver(fixture_path, defaults) -> None:
    result = await AnalysisWorkflow(defaults).concrete(fixture_path("packet_receiver"))
    assert result["max"] == pytest.approx(0.01, abs=1e-6)
    assert result["min"] == pytest.approx(0.0, abs=1e-6)
    assert result["configurations"] == 302


async def test_concrete_respects_the_state_cap(fixture_path, defaults) -> None:
    with pytest.raises(OracleInfeasibleError):
        await AnalysisWorkflow(defaults).concrete(fixture_path("coin_count_loop"), max_states=500)


async def test_audit_reports_a_valid_game(fixture_path, defaults) -> None:
    config = AnalyzeConfig.from_settings(
        fixture_path("packet_receiver_clipped"), defaults, widen_key="var:ctr", depth_threshold=0
    )
    report = await AnalysisWorkflow(defaults).audit(config)
    assert report["ok"] is True
    assert report["violations"] == []
    assert report["player1_nodes"] == 7
    assert report["game_size"] == 29


async def test_undeclared_widen_key_is_rejected(fixture_path, defaults) -> None:
    config = AnalyzeConfig.from_settings(fixture_path("packet_receiver"), defaults, widen_key="var:pc")
    with pytest.raises(AnalysisConfigError):
        await AnalysisWorkflow(defaults).analyze(config)


def test_config_merges_settings_and_overrides(fixture_path, monkeypatch) -> None:
    monkeypatch.setenv("REACH_BOUNDS_DOMAIN", "product")
    monkeypatch.setenv("REACH_BOUNDS_MAX_ROUNDS", "3")
    source = Settings(_env_file=None)
    config = AnalyzeConfig.from_settings(fixture_path("packet_receiver"), source, candidates=None, widen_key="var:nrp")
    assert config.domain.value == "product"
    assert config.max_rounds == 3
    assert config.candidates == 15
    assert config.widen_key == WidenKey("nrp")
    options = config.refinement_options()
    assert options.max_rounds == 3
    assert options.widen_key == WidenKey("nrp")


@pytest.mark.parametrize(
    "overrides",
    [{"widen_key": "loop"}, {"candidates": 0}, {"domain": "octagon"}, {"gap_target": -1.0}],
)
def test_invalid_options_raise_config_errors(fixture_path, defaults, overrides) -> None:
    with pytest.raises(AnalysisConfigError):
        AnalyzeConfig.from_settings(fixture_path("packet_receiver"), defaults, **overrides)


def test_settings_reject_nonpositive_values(monkeypatch) -> None:
    monkeypatch.setenv("REACH_BOUNDS_TOLERANCE", "0")
    with pytest.raises(ValueError):
        Settings(_env_file=None)
