"""Refinement loop: delay widening where it costs precision, rebuild, re-solve."""
from __future__ import annotations

import asyncio
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

from reach_bounds.core.errors import NodeBudgetExceededError
from reach_bounds.core.game import DelayConfig, Game, NodeKind, TreePath, WidenKey, render_path
from reach_bounds.core.models import Program
from reach_bounds.domains.base import AbstractDomain
from reach_bounds.services.game_builder import DEFAULT_NODE_BUDGET, build_game
from reach_bounds.services.solver import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
    GameSolution,
    GameValues,
    Kappa,
    max_target,
    min_target,
    solve,
)

LOGGER = logging.getLogger(__name__)

# Gaps at or below this are treated as closed when ranking candidates.
GAP_EPSILON = 1e-9
# Lower values may exceed upper ones by this much before a round is reported as inconsistent.
BOUNDS_SLACK = 1e-6


class Query(str, Enum):
    MAX = "max"
    MIN = "min"
    BOTH = "both"

    def components(self) -> Tuple["Query", ...]:
        return (Query.MAX, Query.MIN) if self is Query.BOTH else (self,)

    @property
    def upper_kappa(self) -> Kappa:
        return Kappa.PLUS_PLUS if self is Query.MAX else Kappa.MINUS_PLUS

    @property
    def lower_kappa(self) -> Kappa:
        return Kappa.PLUS_MINUS if self is Query.MAX else Kappa.MINUS_MINUS

    def target(self, game: Game) -> FrozenSet[int]:
        return max_target(game) if self is Query.MAX else min_target(game)


class Heuristic(str, Enum):
    MASS = "mass"
    DEPTH = "depth"
    MIXED = "mixed"


class RefinementStatus(str, Enum):
    CONVERGED = "converged"
    BUDGET_EXHAUSTED = "budget-exhausted"
    STALLED = "stalled"


@dataclass(frozen=True, slots=True)
class Candidate:
    """Player-1 node whose widened tree children are worth unrolling."""

    node: int
    path: TreePath
    mass: float
    gap: float
    depth: int

    @property
    def score(self) -> float:
        return self.mass * self.gap

    def as_dict(self) -> Dict[str, Any]:
        return {
            "node": self.node,
            "path": render_path(self.path),
            "mass": self.mass,
            "gap": self.gap,
            "score": self.score,
            "depth": self.depth,
        }


@dataclass(frozen=True, slots=True)
class Bounds:
    lower: float
    upper: float

    @classmethod
    def of(cls, lower: float, upper: float, slack: float = BOUNDS_SLACK) -> "Bounds":
        """Keep the solved values as they are; warn when they cross by more than ``slack``."""
        if lower - upper > slack:
            LOGGER.warning("Lower bound %.9f exceeds upper bound %.9f", lower, upper)
        return cls(lower, upper)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def as_list(self) -> List[float]:
        return [self.lower, self.upper]


@dataclass(slots=True)
class RefinementRound:
    index: int
    game_size: int
    player1_nodes: int
    values: Dict[Kappa, float]
    bounds: Dict[Query, Bounds]
    candidates: List[Candidate] = field(default_factory=list)
    elapsed_ms: float = 0.0

    def as_dict(self) -> Dict[str, Any]:
        return {
            "round": self.index,
            "game_size": self.game_size,
            "player1_nodes": self.player1_nodes,
            "values": {kappa.value: value for kappa, value in self.values.items()},
            "bounds": {query.value: b.as_list() for query, b in self.bounds.items()},
            "candidates": [candidate.as_dict() for candidate in self.candidates],
            "elapsed_ms": self.elapsed_ms,
        }


@dataclass(slots=True)
class RefinementReport:
    query: Query
    domain: str
    heuristic: Heuristic
    rounds: List[RefinementRound] = field(default_factory=list)
    status: RefinementStatus = RefinementStatus.BUDGET_EXHAUSTED
    delay: DelayConfig = field(default_factory=DelayConfig)
    game: Optional[Game] = None
    solutions: Dict[Kappa, GameSolution] = field(default_factory=dict)

    @property
    def bounds(self) -> Dict[Query, Bounds]:
        return dict(self.rounds[-1].bounds) if self.rounds else {}

    @property
    def game_nodes_max(self) -> int:
        return max((r.player1_nodes for r in self.rounds), default=0)

    @property
    def time_ms(self) -> float:
        return sum(r.elapsed_ms for r in self.rounds)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "query": self.query.value,
            "domain": self.domain,
            "heuristic": self.heuristic.value,
            "status": self.status.value,
            "bounds": {query.value: b.as_list() for query, b in self.bounds.items()},
            "rounds": [r.as_dict() for r in self.rounds],
            "game_nodes_max": self.game_nodes_max,
            "time_ms": self.time_ms,
        }


@dataclass(frozen=True, slots=True)
class RefinementOptions:
    query: Query = Query.MAX
    heuristic: Heuristic = Heuristic.MIXED
    candidates: int = 15
    depth_threshold: int = 4
    gap_target: float = 0.01
    max_rounds: int = 10
    widen_key: WidenKey = field(default_factory=WidenKey)
    widen_up_to: bool = False
    node_budget: int = DEFAULT_NODE_BUDGET
    tol: float = DEFAULT_TOLERANCE
    max_iters: int = DEFAULT_MAX_ITERATIONS


def tree_masses(game: Game) -> Dict[int, float]:
    """Product of the probabilities on the spanning-tree path to every Player-1 node."""
    masses: Dict[int, float] = {game.start: 1.0}
    for node in game.nodes_of(NodeKind.PLAYER1):
        if node == game.start:
            continue
        via = game.via[node]
        parent = game.tree_parent(node)
        if via is None or parent is None or parent not in masses:
            continue
        masses[node] = masses[parent] * float(game.distribution(via).get(node, 0))
    return masses


def select_candidates(
    game: Game,
    upper: GameValues,
    lower: GameValues,
    heuristic: Heuristic | str,
    n: int,
    depth_threshold: int,
) -> List[Candidate]:
    """Player-1 nodes whose widened tree children should be unrolled next.

    Nodes whose bound gap is already closed never qualify. ``mass`` ranks by tree mass
    times bound gap and keeps the best ``n``. ``depth`` returns every node shallower
    than ``depth_threshold``. ``mixed`` keeps those shallow nodes and adds the best
    ``n`` at or below the threshold. Results are ordered by score.
    """
    heuristic = Heuristic(heuristic)
    children = game.tree_children()
    masses = tree_masses(game)
    pool: List[Candidate] = []
    for node in game.nodes_of(NodeKind.PLAYER1):
        if not any(child in game.widened for child in children.get(node, ())):
            continue
        gap = upper.at(node) - lower.at(node)
        if gap <= GAP_EPSILON:
            continue
        pool.append(
            Candidate(
                node=node,
                path=game.paths[node],
                mass=masses.get(node, 0.0),
                gap=gap,
                depth=game.depth[node],
            )
        )
    pool.sort(key=lambda c: (-c.score, c.depth, c.node))

    shallow = [c for c in pool if c.depth < depth_threshold]
    if heuristic is Heuristic.MASS:
        return pool[:n]
    if heuristic is Heuristic.DEPTH:
        return shallow
    deep = [c for c in pool if c.depth >= depth_threshold][:n]
    return sorted(shallow + deep, key=lambda c: (-c.score, c.depth, c.node))


def suppression_paths(game: Game, candidates: Sequence[Candidate]) -> List[TreePath]:
    """Creating-call paths of the widened tree children of ``candidates``."""
    children = game.tree_children()
    paths: List[TreePath] = []
    for candidate in candidates:
        for child in children.get(candidate.node, ()):
            if child in game.widened:
                paths.append(game.paths[child])
    return paths


class Refiner:
    """Runs build, solve and candidate selection rounds until the bounds close."""

    def __init__(
        self,
        program: Program,
        domain: AbstractDomain,
        options: Optional[RefinementOptions] = None,
    ) -> None:
        self._program = program
        self._domain = domain
        self._options = options or RefinementOptions()

    def _initial_delay(self) -> DelayConfig:
        options = self._options
        threshold = 0 if options.heuristic is Heuristic.MASS else options.depth_threshold
        return DelayConfig(
            depth_threshold=threshold,
            widen_key=options.widen_key,
            up_to_guards=options.widen_up_to,
        )

    async def _solve_round(self, game: Game) -> Dict[Kappa, GameSolution]:
        options = self._options
        jobs: List[Tuple[Kappa, FrozenSet[int]]] = []
        for query in options.query.components():
            jobs.append((query.upper_kappa, query.target(game)))
            jobs.append((query.lower_kappa, query.target(game)))
        results = await asyncio.gather(
            *(
                asyncio.to_thread(solve, game, kappa, target, options.tol, options.max_iters)
                for kappa, target in jobs
            )
        )
        return {kappa: result for (kappa, _), result in zip(jobs, results)}

    async def run(self) -> RefinementReport:
        options = self._options
        report = RefinementReport(options.query, self._domain.name, options.heuristic)
        delay = self._initial_delay()

        for index in range(1, options.max_rounds + 1):
            started = time.perf_counter()
            try:
                game = await asyncio.to_thread(
                    build_game, self._program, self._domain, delay, options.node_budget
                )
            except NodeBudgetExceededError as err:
                report.delay = delay
                err.partial_report = report
                raise
            solutions = await self._solve_round(game)
            start = game.start
            bounds = {
                query: Bounds.of(
                    solutions[query.lower_kappa].values.at(start),
                    solutions[query.upper_kappa].values.at(start),
                )
                for query in options.query.components()
            }
            current = RefinementRound(
                index=index,
                game_size=game.size,
                player1_nodes=game.player1_count,
                values={kappa: s.values.at(start) for kappa, s in solutions.items()},
                bounds=bounds,
            )
            report.rounds.append(current)
            report.game = game
            report.solutions = solutions
            report.delay = delay
            LOGGER.info(
                "Round %d: %d Player-1 nodes, bounds %s",
                index,
                game.player1_count,
                ", ".join(f"{q.value}=[{b.lower:.6f}, {b.upper:.6f}]" for q, b in bounds.items()),
            )

            open_queries = [q for q, b in bounds.items() if b.gap > options.gap_target]
            finished = True
            if not open_queries:
                report.status = RefinementStatus.CONVERGED
            elif index == options.max_rounds:
                report.status = RefinementStatus.BUDGET_EXHAUSTED
            else:
                refined = self._next_delay(game, solutions, open_queries, delay, current)
                if refined is None:
                    report.status = RefinementStatus.STALLED
                else:
                    delay = refined
                    finished = False
            current.elapsed_ms = (time.perf_counter() - started) * 1000.0
            if finished:
                break
        return report

    def _next_delay(
        self,
        game: Game,
        solutions: Dict[Kappa, GameSolution],
        open_queries: Sequence[Query],
        delay: DelayConfig,
        current: RefinementRound,
    ) -> Optional[DelayConfig]:
        options = self._options
        threshold = delay.depth_threshold
        if options.heuristic is Heuristic.DEPTH:
            threshold += 1
        chosen: Dict[int, Candidate] = {}
        for query in open_queries:
            for candidate in select_candidates(
                game,
                solutions[query.upper_kappa].values,
                solutions[query.lower_kappa].values,
                options.heuristic,
                options.candidates,
                threshold,
            ):
                chosen.setdefault(candidate.node, candidate)
        if not chosen:
            LOGGER.info("No refinement candidates left; stopping")
            return None
        current.candidates = sorted(chosen.values(), key=lambda c: (-c.score, c.depth, c.node))
        if options.heuristic is Heuristic.DEPTH:
            return delay.with_threshold(threshold)
        return delay.suppress(suppression_paths(game, current.candidates))


def refine_loop(
    program: Program,
    domain: AbstractDomain,
    options: Optional[RefinementOptions] = None,
) -> RefinementReport:
    """Blocking wrapper around :meth:`Refiner.run` for callers outside an event loop."""
    return asyncio.run(Refiner(program, domain, options).run())
