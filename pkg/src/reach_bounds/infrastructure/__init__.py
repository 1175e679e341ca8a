"""Infrastructure helpers for writing analysis artefacts."""

from reach_bounds.infrastructure.dot import render_game, write_game
from reach_bounds.infrastructure.export import write_json

__all__ = ["render_game", "write_game", "write_json"]
