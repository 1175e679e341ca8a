"""Extremal reachability values of game abstractions and their memoryless strategies."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, Optional, Tuple

from reach_bounds.core.errors import StrategyError
from reach_bounds.core.game import Game, NodeKind
from reach_bounds.services.value_iteration import Arena, compile_arena, extract_choices, iterate

LOGGER = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
DEFAULT_MAX_ITERATIONS = 1_000_000


class Kappa(str, Enum):
    """Objective of both players: first sign for Player 1, second for Player 2."""

    PLUS_PLUS = "++"
    PLUS_MINUS = "+-"
    MINUS_PLUS = "-+"
    MINUS_MINUS = "--"

    @property
    def player1_maximizes(self) -> bool:
        return self.value[0] == "+"

    @property
    def player2_maximizes(self) -> bool:
        return self.value[1] == "+"


def max_target(game: Game) -> FrozenSet[int]:
    return frozenset({game.accept})


def min_target(game: Game) -> FrozenSet[int]:
    return frozenset({game.accept, game.reject})


@dataclass(frozen=True, slots=True)
class Strategy:
    """Chosen successor per owned node."""

    choices: Dict[int, int] = field(default_factory=dict)

    def get(self, node: int) -> Optional[int]:
        return self.choices.get(node)

    def __getitem__(self, node: int) -> int:
        return self.choices[node]

    def __len__(self) -> int:
        return len(self.choices)

    def as_dict(self) -> Dict[str, int]:
        return {str(node): target for node, target in sorted(self.choices.items())}


@dataclass(frozen=True, slots=True)
class GameValues:
    kappa: Kappa
    target: FrozenSet[int]
    values: Tuple[float, ...]
    residual: float
    iterations: int

    def at(self, node: int) -> float:
        return self.values[node]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "kappa": self.kappa.value,
            "target": sorted(self.target),
            "values": {str(node): value for node, value in enumerate(self.values)},
            "residual": self.residual,
            "iterations": self.iterations,
        }


@dataclass(frozen=True, slots=True)
class GameSolution:
    values: GameValues
    player1: Strategy
    player2: Strategy

    def as_dict(self) -> Dict[str, Any]:
        payload = self.values.as_dict()
        payload["player1"] = self.player1.as_dict()
        payload["player2"] = self.player2.as_dict()
        return payload


def _owner_flag(game: Game, node: int, kappa: Kappa) -> Optional[bool]:
    kind = game.nodes[node].kind
    if kind is NodeKind.PLAYER1:
        return kappa.player1_maximizes
    if kind in (NodeKind.PLAYER2_COMMAND, NodeKind.PLAYER2_FINAL):
        return kappa.player2_maximizes
    return None


def game_arena(game: Game, kappa: Kappa, target: Iterable[int]) -> Arena:
    """Arena view of ``game`` for objective ``kappa``; terminals outside ``target`` are sinks."""
    target = frozenset(target)
    choices = []
    chances = []
    for node in range(game.size):
        if node in target:
            continue
        successors = game.successors(node)
        if game.nodes[node].is_probabilistic:
            chances.append((node, [(t, float(p)) for t, p in game.distributions[node]]))
            continue
        flag = _owner_flag(game, node, kappa)
        if flag is not None and successors:
            choices.append((node, list(successors), flag))
    return compile_arena(game.size, choices, chances, target)


def solve(
    game: Game,
    kappa: Kappa | str,
    target: Iterable[int],
    tol: float = DEFAULT_TOLERANCE,
    max_iters: int = DEFAULT_MAX_ITERATIONS,
) -> GameSolution:
    """Least fixed point of the reachability operator for ``kappa`` plus optimal strategies."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    kappa = Kappa(kappa)
    target = frozenset(target)
    arena = game_arena(game, kappa, target)
    result = iterate(arena, tol, max_iters)
    picked = extract_choices(arena, result.values, max(10 * tol, 1e-12))

    player1: Dict[int, int] = {}
    player2: Dict[int, int] = {}
    for node, successor in picked.items():
        owner = player1 if game.nodes[node].kind is NodeKind.PLAYER1 else player2
        owner[node] = successor

    values = GameValues(
        kappa=kappa,
        target=target,
        values=tuple(float(v) for v in result.values),
        residual=result.residual,
        iterations=result.iterations,
    )
    LOGGER.debug(
        "Solved %s on %d nodes: start value %.6f after %d sweeps",
        kappa.value,
        game.size,
        values.at(game.start),
        result.iterations,
    )
    return GameSolution(values, Strategy(player1), Strategy(player2))


def evaluate_strategies(
    game: Game,
    player1: Strategy,
    player2: Strategy,
    target: Iterable[int],
    tol: float = DEFAULT_TOLERANCE,
    max_iters: int = DEFAULT_MAX_ITERATIONS,
) -> float:
    """Probability of reaching ``target`` from the start in the chain both strategies induce."""
    target = frozenset(target)
    choices = []
    chances = []
    seen = {game.start}
    queue = deque([game.start])
    while queue:
        node = queue.popleft()
        if node in target:
            continue
        info = game.nodes[node]
        successors = game.successors(node)
        if info.is_probabilistic:
            distribution = [(t, float(p)) for t, p in game.distributions[node] if p > 0]
            chances.append((node, distribution))
            following = [t for t, _ in distribution]
        elif successors:
            strategy = player1 if info.kind is NodeKind.PLAYER1 else player2
            chosen = strategy.get(node)
            if chosen is None:
                raise StrategyError(f"No choice for reachable node {node}")
            if chosen not in successors:
                raise StrategyError(f"Choice {node} -> {chosen} is not an edge of the game")
            choices.append((node, [chosen], True))
            following = [chosen]
        else:
            following = []
        for successor in following:
            if successor not in seen:
                seen.add(successor)
                queue.append(successor)

    arena = compile_arena(game.size, choices, chances, target)
    return float(iterate(arena, tol, max_iters).values[game.start])
