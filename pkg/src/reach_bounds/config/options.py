"""Validated options of a single analysis run."""
from __future__ import annotations

from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from reach_bounds.config.config import Settings, settings
from reach_bounds.core.errors import AnalysisConfigError
from reach_bounds.core.game import WidenKey
from reach_bounds.core.models import Program
from reach_bounds.domains import DomainName
from reach_bounds.services.refiner import Heuristic, Query, RefinementOptions


class AnalyzeConfig(BaseModel):
    """One ``analyze`` invocation: settings defaults merged with command-line flags."""

    model_config = ConfigDict(frozen=True)

    input: Path
    domain: DomainName = DomainName.INTERVAL
    query: Query = Query.MAX
    heuristic: Heuristic = Heuristic.MIXED
    candidates: int = Field(15, gt=0)
    depth_threshold: int = Field(4, ge=0)
    gap_target: float = Field(0.01, gt=0)
    tol: float = Field(1e-9, gt=0)
    max_iters: int = Field(1_000_000, gt=0)
    max_rounds: int = Field(10, gt=0)
    node_budget: int = Field(100_000, gt=0)
    widen_key: WidenKey = Field(default_factory=WidenKey)
    widen_up_to: bool = False
    emit_game: Optional[Path] = None
    dump_values: Optional[Path] = None
    as_json: bool = False

    @field_validator("widen_key", mode="before")
    def _parse_widen_key(cls, value: Any) -> WidenKey:
        if isinstance(value, WidenKey):
            return value
        try:
            return WidenKey.parse(str(value))
        except AnalysisConfigError as err:
            raise ValueError(str(err)) from err

    @classmethod
    def from_settings(
        cls,
        input: str | Path,
        source: Optional[Settings] = None,
        **overrides: Any,
    ) -> "AnalyzeConfig":
        """Build from ``source`` defaults; ``None`` overrides keep the default."""
        source = source or settings
        values = {
            "input": Path(input),
            "domain": source.domain,
            "heuristic": source.heuristic,
            "candidates": source.candidates,
            "depth_threshold": source.depth_threshold,
            "gap_target": source.gap_target,
            "tol": source.tolerance,
            "max_iters": source.max_iterations,
            "max_rounds": source.max_rounds,
            "node_budget": source.node_budget,
            "widen_key": source.widen_key,
            "widen_up_to": source.widen_up_to,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return cls(**values)
        except ValidationError as err:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in issue['loc']) or 'config'}: {issue['msg']}"
                for issue in err.errors()
            )
            raise AnalysisConfigError(f"Invalid analysis options: {problems}", details=err.errors()) from err

    def check_program(self, program: Program) -> None:
        """Post-parse checks that need the declared variables."""
        key = self.widen_key.variable
        if key is not None and key not in program.variables:
            raise AnalysisConfigError(f"Widen key variable '{key}' is not declared")

    def refinement_options(self) -> RefinementOptions:
        return RefinementOptions(
            query=self.query,
            heuristic=self.heuristic,
            candidates=self.candidates,
            depth_threshold=self.depth_threshold,
            gap_target=self.gap_target,
            max_rounds=self.max_rounds,
            widen_key=self.widen_key,
            widen_up_to=self.widen_up_to,
            node_budget=self.node_budget,
            tol=self.tol,
            max_iters=self.max_iters,
        )
