"""Stochastic two-player game arenas produced by the game builder."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, List, Optional, Tuple

from reach_bounds.core.errors import AnalysisConfigError

if TYPE_CHECKING:  # pragma: no cover - typing only
    from reach_bounds.domains.base import AbstractElement


class NodeKind(str, Enum):
    """Node categories of the arena."""

    PLAYER1 = "player1"
    ACCEPT = "accept"
    REJECT = "reject"
    PLAYER2_COMMAND = "player2-command"
    PLAYER2_FINAL = "player2-final"
    PROBABILISTIC = "probabilistic"


@dataclass(frozen=True, slots=True)
class TreeStep:
    """One spanning-tree edge: command, guard-split branch and update index."""

    command: str
    branch: int
    update: int

    def render(self) -> str:
        return f"{self.command}/{self.branch}/{self.update}"


TreePath = Tuple[TreeStep, ...]


def render_path(path: TreePath) -> str:
    return ".".join(step.render() for step in path) or "<root>"


@dataclass(frozen=True, slots=True)
class WidenKey:
    """Which ancestors qualify as widening anchors.

    ``variable=None`` selects ancestors created by the same command; with ``per_update``
    the ancestor must also come from the same update of that command, and children of
    the start node never serve. Otherwise the nearest ancestor that pins ``variable``
    to the same value as the new element.
    """

    variable: Optional[str] = None
    per_update: bool = False

    @classmethod
    def parse(cls, text: str) -> "WidenKey":
        cleaned = text.strip()
        if cleaned.lower() == "command":
            return cls()
        if cleaned.lower() == "update":
            return cls(per_update=True)
        if cleaned.lower().startswith("var:") and cleaned[4:].strip():
            return cls(cleaned[4:].strip())
        raise AnalysisConfigError(
            f"Unknown widen key '{text}'; use 'command', 'update' or 'var:<name>'"
        )

    @property
    def is_command(self) -> bool:
        return self.variable is None

    def __str__(self) -> str:
        if self.variable is not None:
            return f"var:{self.variable}"
        return "update" if self.per_update else "command"


@dataclass(frozen=True, slots=True)
class DelayConfig:
    """Where widening is held back during game construction.

    ``up_to_guards`` keeps, after each widening, every single-variable guard or reach
    atom (or its negation) that the joined element already satisfies, and only widens
    against ancestors whose elements satisfied the same atoms when they were created.
    """

    depth_threshold: int = 0
    suppressed: FrozenSet[TreePath] = frozenset()
    widen_key: WidenKey = field(default_factory=WidenKey)
    up_to_guards: bool = False

    def suppress(self, paths: Iterable[TreePath]) -> "DelayConfig":
        return replace(self, suppressed=self.suppressed | frozenset(paths))

    def with_threshold(self, depth_threshold: int) -> "DelayConfig":
        return replace(self, depth_threshold=depth_threshold)

    def blocks(self, depth: int, path: TreePath) -> bool:
        return depth < self.depth_threshold or path in self.suppressed


@dataclass(frozen=True, slots=True)
class GameNode:
    """Arena node; which optional fields are set depends on ``kind``."""

    kind: NodeKind
    element: Optional["AbstractElement"] = None
    owner: Optional[int] = None
    command: Optional[str] = None
    refined: Optional["AbstractElement"] = None
    targets: Tuple[int, ...] = ()

    @property
    def is_player1(self) -> bool:
        return self.kind in (NodeKind.PLAYER1, NodeKind.ACCEPT, NodeKind.REJECT)

    @property
    def is_player2(self) -> bool:
        return self.kind in (NodeKind.PLAYER2_COMMAND, NodeKind.PLAYER2_FINAL)

    @property
    def is_probabilistic(self) -> bool:
        return self.kind is NodeKind.PROBABILISTIC


@dataclass(frozen=True, slots=True)
class Game:
    """Finished arena with the spanning-tree bookkeeping of its construction.

    ``pred`` maps a Player-1 node to the Player-2 node it was first created under and
    ``via`` to the probabilistic node whose outcome created it; both are ``None`` for the
    start node and for every node that is not a Player-1 element node.
    """

    nodes: Tuple[GameNode, ...]
    edges: Tuple[Tuple[int, ...], ...]
    distributions: Tuple[Tuple[Tuple[int, Fraction], ...], ...]
    start: int
    accept: int = 0
    reject: int = 1
    pred: Tuple[Optional[int], ...] = ()
    via: Tuple[Optional[int], ...] = ()
    depth: Tuple[Optional[int], ...] = ()
    paths: Tuple[Optional[TreePath], ...] = ()
    widened: FrozenSet[int] = frozenset()

    @property
    def size(self) -> int:
        return len(self.nodes)

    def successors(self, node: int) -> Tuple[int, ...]:
        return self.edges[node]

    def distribution(self, node: int) -> Dict[int, Fraction]:
        return dict(self.distributions[node])

    def nodes_of(self, kind: NodeKind) -> List[int]:
        return [index for index, node in enumerate(self.nodes) if node.kind is kind]

    @property
    def player1_count(self) -> int:
        """Number of Player-1 element nodes, excluding the two terminal nodes."""
        return sum(1 for node in self.nodes if node.kind is NodeKind.PLAYER1)

    def tree_parent(self, node: int) -> Optional[int]:
        """The Player-1 node whose expansion first created ``node``."""
        if node >= len(self.pred) or self.pred[node] is None:
            return None
        return self.nodes[self.pred[node]].owner

    def tree_children(self) -> Dict[int, List[int]]:
        children: Dict[int, List[int]] = defaultdict(list)
        for node in range(self.size):
            parent = self.tree_parent(node)
            if parent is not None:
                children[parent].append(node)
        return children
