"""Worklist construction of a valid game abstraction of a program."""
from __future__ import annotations

import logging
from collections import deque
from fractions import Fraction
from typing import Deque, Dict, List, Optional, Sequence, Set, Tuple

from reach_bounds.core.errors import AnalysisConfigError, NodeBudgetExceededError
from reach_bounds.core.game import (
    DelayConfig,
    Game,
    GameNode,
    NodeKind,
    TreePath,
    TreeStep,
)
from reach_bounds.core.models import IDLE_COMMAND, Atom, Guard, Program, Update
from reach_bounds.domains.base import AbstractDomain, AbstractElement, FinalOverlap, GuardStatus

LOGGER = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 100_000
# Above this many pieces the idle check gives up and answers Mixed.
MAX_COMPLEMENT_PIECES = 64

ACCEPT = 0
REJECT = 1


class GameBuilder:
    """Build the arena breadth-first, deduplicating Player-1 nodes by element equality."""

    def __init__(
        self,
        program: Program,
        domain: AbstractDomain,
        delay: Optional[DelayConfig] = None,
        node_budget: int = DEFAULT_NODE_BUDGET,
    ) -> None:
        if any(not atom.is_single_variable for atom in program.reach.atoms):
            raise AnalysisConfigError("Reach atoms must mention at most one variable")
        delay = delay or DelayConfig()
        key = delay.widen_key.variable
        if key is not None and key not in program.variables:
            raise AnalysisConfigError(f"Widen key variable '{key}' is not declared")
        if tuple(domain.variables) != program.variables:
            raise AnalysisConfigError("Domain variables do not match the program declarations")

        self._program = program
        self._domain = domain
        self._delay = delay
        self._budget = node_budget

        self._nodes: List[GameNode] = []
        self._edges: List[List[int]] = []
        self._dists: List[Tuple[Tuple[int, Fraction], ...]] = []
        self._pred: List[Optional[int]] = []
        self._via: List[Optional[int]] = []
        self._depth: List[Optional[int]] = []
        self._paths: List[Optional[TreePath]] = []
        self._signatures: List[Tuple[bool, ...]] = []
        self._limits: Tuple[Atom, ...] = widening_limits(program) if delay.up_to_guards else ()
        self._index: Dict[AbstractElement, int] = {}
        self._widened: Set[int] = set()
        self._work: Deque[int] = deque()
        self._player1 = 0

    # -- bookkeeping -----------------------------------------------------------------
    def _add(self, node: GameNode) -> int:
        self._nodes.append(node)
        self._edges.append([])
        self._dists.append(())
        self._pred.append(None)
        self._via.append(None)
        self._depth.append(None)
        self._paths.append(None)
        self._signatures.append(())
        return len(self._nodes) - 1

    def _edge(self, source: int, target: int) -> None:
        self._edges[source].append(target)

    def _register(
        self,
        element: AbstractElement,
        *,
        pred: Optional[int],
        depth: int,
        path: TreePath,
        signature: Tuple[bool, ...],
        widened: bool,
    ) -> Tuple[int, bool]:
        existing = self._index.get(element)
        if existing is not None:
            return existing, False
        if self._player1 >= self._budget:
            raise NodeBudgetExceededError(self._budget)
        node = self._add(GameNode(NodeKind.PLAYER1, element=element))
        self._player1 += 1
        self._index[element] = node
        self._pred[node] = pred
        self._depth[node] = depth
        self._paths[node] = path
        self._signatures[node] = signature
        if widened:
            self._widened.add(node)
        self._work.append(node)
        return node, True

    def _tree_parent(self, node: int) -> Optional[int]:
        pred = self._pred[node]
        return None if pred is None else self._nodes[pred].owner

    # -- algorithm -------------------------------------------------------------------
    def build(self) -> Game:
        self._add(GameNode(NodeKind.ACCEPT))
        self._add(GameNode(NodeKind.REJECT))
        root = self._domain.abstract_singleton(self._program.init)
        start, _ = self._register(
            root, pred=None, depth=0, path=(), signature=self._signature(root), widened=False
        )
        while self._work:
            self.gensuccs(self._work.popleft())

        game = Game(
            nodes=tuple(self._nodes),
            edges=tuple(tuple(targets) for targets in self._edges),
            distributions=tuple(self._dists),
            start=start,
            accept=ACCEPT,
            reject=REJECT,
            pred=tuple(self._pred),
            via=tuple(self._via),
            depth=tuple(self._depth),
            paths=tuple(self._paths),
            widened=frozenset(self._widened),
        )
        LOGGER.debug(
            "Built %s game: %d nodes, %d Player-1 nodes, %d widened",
            self._domain.name,
            game.size,
            game.player1_count,
            len(self._widened),
        )
        return game

    def gensuccs(self, node: int) -> None:
        """Expand one Player-1 node: final proposal, command proposals, idle closure."""
        domain = self._domain
        element = self._nodes[node].element
        overlap = domain.final_overlap(element, self._program.reach)
        fopt = False
        if overlap.intersects:
            final = self._add(GameNode(NodeKind.PLAYER2_FINAL, owner=node))
            self._edge(node, final)
            self._edge(final, ACCEPT)
            if overlap.contained:
                return
            self._edge(final, final)
            fopt = True

        any_full = False
        all_empty = True
        for command in self._program.commands:
            status = domain.guard_status(element, command.guard)
            if status is GuardStatus.EMPTY_CERTAIN:
                continue
            all_empty = False
            any_full = any_full or status is GuardStatus.FULL_CERTAIN
            self._propose(
                node,
                command.name,
                status,
                fopt,
                domain.guard_split(element, command.guard),
                command.updates,
            )

        idle = self._idle_status(element, overlap, any_full, all_empty)
        if idle is not GuardStatus.EMPTY_CERTAIN:
            proposal = self._add(GameNode(NodeKind.PLAYER2_COMMAND, owner=node, command=IDLE_COMMAND))
            self._edge(node, proposal)
            if idle is not GuardStatus.FULL_CERTAIN:
                self._edge(proposal, REJECT)
            if fopt:
                self._edge(proposal, ACCEPT)
            loop = self._add(
                GameNode(
                    NodeKind.PROBABILISTIC,
                    owner=node,
                    command=IDLE_COMMAND,
                    refined=element,
                    targets=(node,),
                )
            )
            self._edge(proposal, loop)
            self._dists[loop] = ((node, Fraction(1)),)

    def _propose(
        self,
        node: int,
        command: str,
        status: GuardStatus,
        fopt: bool,
        splits: Sequence[AbstractElement],
        updates: Sequence[Update],
    ) -> None:
        domain = self._domain
        proposal = self._add(GameNode(NodeKind.PLAYER2_COMMAND, owner=node, command=command))
        self._edge(node, proposal)
        if status is not GuardStatus.FULL_CERTAIN:
            self._edge(proposal, REJECT)
        if fopt:
            self._edge(proposal, ACCEPT)

        depth = self._depth[node] + 1
        for branch, refined in enumerate(splits):
            targets: List[int] = []
            created: List[int] = []
            weights: Dict[int, Fraction] = {}
            for position, update in enumerate(updates):
                post = domain.assign_transform(refined, update.assignment)
                step = TreeStep(command, branch, position)
                path = self._paths[node] + (step,)
                signature = self._signature(post)
                value = self.extrapolate(post, node, step, path, signature)
                target, is_new = self._register(
                    value,
                    pred=proposal,
                    depth=depth,
                    path=path,
                    signature=signature,
                    widened=value != post,
                )
                targets.append(target)
                if is_new:
                    created.append(target)
                weights[target] = weights.get(target, Fraction(0)) + update.probability
            outcome = self._add(
                GameNode(
                    NodeKind.PROBABILISTIC,
                    owner=node,
                    command=command,
                    refined=refined,
                    targets=tuple(targets),
                )
            )
            self._edge(proposal, outcome)
            self._dists[outcome] = tuple(sorted(weights.items()))
            for target in created:
                self._via[target] = outcome

    def extrapolate(
        self,
        value: AbstractElement,
        node: int,
        step: TreeStep,
        path: TreePath,
        signature: Tuple[bool, ...] = (),
    ) -> AbstractElement:
        """Widen ``value`` against the nearest matching spanning-tree ancestor of ``node``."""
        if self._delay.blocks(self._depth[node], path):
            return value
        anchor = self._find_anchor(value, node, step, signature)
        if anchor is None:
            return value
        domain = self._domain
        previous = self._nodes[anchor].element
        joined = domain.join(previous, value)
        widened = domain.widen(previous, joined)
        for atom in self._limits:
            if domain.atom_certain(joined, atom):
                widened = domain.meet_atom(widened, atom)
        return widened

    def _signature(self, element: AbstractElement) -> Tuple[bool, ...]:
        """Which widening limits ``element`` certainly satisfies."""
        return tuple(self._domain.atom_certain(element, atom) for atom in self._limits)

    def _find_anchor(
        self,
        value: AbstractElement,
        node: int,
        step: TreeStep,
        signature: Tuple[bool, ...] = (),
    ) -> Optional[int]:
        """Walk from ``node`` (inclusive) towards the root for a widening anchor.

        Command keys match the step that created each ancestor. A variable key matches
        the first ancestor pinning the variable to the value ``value`` pins; when
        ``value`` pins nothing the expanding node itself is the anchor, whatever it pins.
        With widening limits the anchor must also have been created from an element
        satisfying the same limits as ``value``.
        """
        key = self._delay.widen_key
        variable = key.variable
        pinned = None if variable is None else self._domain.pinned_value(value, variable)
        current: Optional[int] = node
        while current is not None:
            if self._signatures[current] == signature and self._keyed(current, step, variable, pinned):
                return current
            current = self._tree_parent(current)
        return None

    def _keyed(
        self, current: int, step: TreeStep, variable: Optional[str], pinned: Optional[int]
    ) -> bool:
        if variable is not None:
            if pinned is None:
                return True
            return self._domain.pinned_value(self._nodes[current].element, variable) == pinned
        if self._delay.widen_key.per_update and self._depth[current] < 2:
            return False
        created = self._paths[current][-1] if self._paths[current] else None
        if created is None or created.command != step.command:
            return False
        return not self._delay.widen_key.per_update or created.update == step.update

    def _idle_status(
        self,
        element: AbstractElement,
        overlap: FinalOverlap,
        any_full: bool,
        all_empty: bool,
    ) -> GuardStatus:
        """Status of the implicit self-loop guard "not final and no command enabled"."""
        if any_full:
            return GuardStatus.EMPTY_CERTAIN
        if all_empty and not overlap.intersects:
            return GuardStatus.FULL_CERTAIN
        guards: List[Guard] = [self._program.reach]
        guards.extend(command.guard for command in self._program.commands)
        pieces: List[AbstractElement] = [element]
        for guard in guards:
            remaining: List[AbstractElement] = []
            for piece in pieces:
                remaining.extend(self._domain.complement_split(piece, guard))
            pieces = remaining
            if not pieces:
                return GuardStatus.EMPTY_CERTAIN
            if len(pieces) > MAX_COMPLEMENT_PIECES:
                break
        return GuardStatus.MIXED


def build_game(
    program: Program,
    domain: AbstractDomain,
    delay: Optional[DelayConfig] = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Game:
    """Construct a valid abstraction of ``program`` over ``domain``."""
    return GameBuilder(program, domain, delay, node_budget).build()


def widening_limits(program: Program) -> Tuple[Atom, ...]:
    """Single-variable guard and reach atoms together with their negations."""
    limits: Dict[Atom, None] = {}
    guards = [command.guard for command in program.commands] + [program.reach]
    for guard in guards:
        for atom in guard.atoms:
            if len(atom.variables) != 1:
                continue
            limits.setdefault(atom, None)
            for negated in atom.complement():
                limits.setdefault(negated, None)
    return tuple(limits)
