"""Application-wide defaults powered by Pydantic settings."""
from __future__ import annotations

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Default analysis options; every value can be overridden per invocation."""

    model_config = SettingsConfigDict(
        env_prefix="REACH_BOUNDS_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    tolerance: float = Field(1e-9)
    max_iterations: int = Field(1_000_000)
    max_states: int = Field(250_000)
    node_budget: int = Field(100_000)

    max_rounds: int = Field(10)
    candidates: int = Field(15)
    depth_threshold: int = Field(4)
    gap_target: float = Field(0.01)

    domain: str = Field("interval")
    heuristic: str = Field("mixed")
    widen_key: str = Field("command")
    widen_up_to: bool = Field(False)
    sample_budget: int = Field(10_000)

    log_level: str = Field("WARNING")

    @field_validator(
        "tolerance",
        "max_iterations",
        "max_states",
        "node_budget",
        "max_rounds",
        "candidates",
        "gap_target",
        "sample_budget",
    )
    def _require_positive(cls, value):
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("depth_threshold")
    def _require_nonnegative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("must be nonnegative")
        return value

    @field_validator("log_level")
    def _normalise_level(cls, value: str) -> str:
        return value.upper()


settings = Settings()
