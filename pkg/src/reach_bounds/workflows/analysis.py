"""High-level orchestration of the analysis services."""
from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

from reach_bounds.config import AnalyzeConfig, Settings, settings
from reach_bounds.core.game import DelayConfig
from reach_bounds.domains import create_domain
from reach_bounds.infrastructure.dot import write_game
from reach_bounds.infrastructure.export import write_json
from reach_bounds.services.concrete_mdp import Mode, build_mdp, mdp_reach
from reach_bounds.services.game_builder import build_game
from reach_bounds.services.parser import load_program
from reach_bounds.services.refiner import Refiner, RefinementReport
from reach_bounds.services.validity import check_validity

LOGGER = logging.getLogger(__name__)


@dataclass(slots=True)
class AnalysisArtifacts:
    """Files written alongside an analysis."""

    game_dot: Optional[Path] = None
    values_json: Optional[Path] = None

    def as_download_dict(self) -> Dict[str, str]:
        mapping: Dict[str, Optional[Path]] = {
            "game": self.game_dot,
            "values": self.values_json,
        }
        return {name: str(path) for name, path in mapping.items() if path}


class AnalysisWorkflow:
    """Coordinate parsing, game construction, refinement and export."""

    def __init__(self, source: Optional[Settings] = None) -> None:
        self._settings = source or settings

    async def analyze(self, config: AnalyzeConfig) -> Dict[str, Any]:
        """Run the refinement loop and return the machine-readable summary."""
        program = await asyncio.to_thread(load_program, config.input)
        config.check_program(program)
        domain = create_domain(config.domain, program.variables)
        LOGGER.info(
            "Analyzing %s with the %s domain (%s query, %s heuristic)",
            config.input,
            domain.name,
            config.query.value,
            config.heuristic.value,
        )
        report = await Refiner(program, domain, config.refinement_options()).run()

        artefacts = AnalysisArtifacts()
        if config.emit_game is not None and report.game is not None:
            artefacts.game_dot = write_game(report.game, domain, config.emit_game)
        if config.dump_values is not None:
            payload = {kappa.value: s.as_dict() for kappa, s in report.solutions.items()}
            artefacts.values_json = write_json(payload, config.dump_values)
        LOGGER.info("Finished after %d rounds: %s", len(report.rounds), report.status.value)
        return self._summary(report, artefacts)

    @staticmethod
    def _summary(report: RefinementReport, artefacts: AnalysisArtifacts) -> Dict[str, Any]:
        bounds = report.bounds
        summary: Dict[str, Any] = {"query": report.query.value}
        if len(bounds) == 1:
            (only,) = bounds.values()
            summary["lower"] = only.lower
            summary["upper"] = only.upper
        summary.update(
            {
                "bounds": {query.value: b.as_list() for query, b in bounds.items()},
                "rounds": len(report.rounds),
                "game_nodes_max": report.game_nodes_max,
                "time_ms": report.time_ms,
                "status": report.status.value,
                "domain": report.domain,
                "history": [r.as_dict() for r in report.rounds],
            }
        )
        files = artefacts.as_download_dict()
        if files:
            summary["files"] = files
        return summary

    async def concrete(
        self,
        input: str | Path,
        max_states: Optional[int] = None,
        tol: Optional[float] = None,
    ) -> Dict[str, Any]:
        """Exact extremal values from the explicit MDP."""
        max_states = max_states or self._settings.max_states
        tol = tol or self._settings.tolerance
        max_iters = self._settings.max_iterations
        program = await asyncio.to_thread(load_program, input)
        mdp = await asyncio.to_thread(build_mdp, program, max_states)
        upper, lower = await asyncio.gather(
            asyncio.to_thread(mdp_reach, mdp, Mode.MAX, tol, max_iters),
            asyncio.to_thread(mdp_reach, mdp, Mode.MIN, tol, max_iters),
        )
        return {
            "max": upper.at(mdp.initial),
            "min": lower.at(mdp.initial),
            "states": mdp.num_nodes,
            "configurations": mdp.num_configurations,
        }

    async def audit(
        self, config: AnalyzeConfig, sample_budget: Optional[int] = None
    ) -> Dict[str, Any]:
        """Build one game with the configured delay and check it for validity."""
        program = await asyncio.to_thread(load_program, config.input)
        config.check_program(program)
        domain = create_domain(config.domain, program.variables)
        delay = DelayConfig(
            depth_threshold=config.depth_threshold,
            widen_key=config.widen_key,
            up_to_guards=config.widen_up_to,
        )
        game = await asyncio.to_thread(build_game, program, domain, delay, config.node_budget)
        report = await asyncio.to_thread(
            check_validity, game, program, domain, sample_budget or self._settings.sample_budget
        )
        if config.emit_game is not None:
            write_game(game, domain, config.emit_game)
        payload = report.as_dict()
        payload["game_size"] = game.size
        payload["player1_nodes"] = game.player1_count
        return payload
