"""Core data models shared across reach-bounds components."""

from reach_bounds.core.game import DelayConfig, Game, GameNode, NodeKind, TreeStep, WidenKey
from reach_bounds.core.models import Configuration, GuardedCommand, Program

__all__ = [
    "Configuration",
    "DelayConfig",
    "Game",
    "GameNode",
    "GuardedCommand",
    "NodeKind",
    "Program",
    "TreeStep",
    "WidenKey",
]
