"""Explicit MDP semantics of a program and its exact reachability values."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Deque, Dict, FrozenSet, List, Optional, Sequence, Tuple

from reach_bounds.core.errors import OracleInfeasibleError, StrategyError
from reach_bounds.core.evaluation import apply_assignment, eval_guard
from reach_bounds.core.models import IDLE_COMMAND, Configuration, Program
from reach_bounds.services.value_iteration import (
    Arena,
    compile_arena,
    extract_choices,
    iterate,
)

LOGGER = logging.getLogger(__name__)

Distribution = Tuple[Tuple[int, Fraction], ...]


class Mode(str, Enum):
    MAX = "max"
    MIN = "min"


@dataclass(frozen=True, slots=True)
class Mdp:
    """Reachable part of the program's MDP.

    ``actions[i]`` names the commands enabled in state ``i`` and ``distributions[i][k]``
    is the successor distribution of the ``k``-th of them. Final states have no actions.
    """

    states: Tuple[Configuration, ...]
    actions: Tuple[Tuple[str, ...], ...]
    distributions: Tuple[Tuple[Distribution, ...], ...]
    initial: int
    final: FrozenSet[int]

    @property
    def num_configurations(self) -> int:
        return len(self.states)

    @property
    def num_action_nodes(self) -> int:
        return sum(len(names) for names in self.actions)

    @property
    def num_nodes(self) -> int:
        """State nodes plus ``(state, command)`` nodes."""
        return self.num_configurations + self.num_action_nodes

    def action_offsets(self) -> List[int]:
        """Node id of the first action node of every state in the arena layout."""
        offsets: List[int] = []
        cursor = self.num_configurations
        for names in self.actions:
            offsets.append(cursor)
            cursor += len(names)
        return offsets

    def arena(self, mode: Mode, choices: Optional[Sequence[Optional[int]]] = None) -> Arena:
        """Arena view; with ``choices`` every state is restricted to its chosen action."""
        offsets = self.action_offsets()
        choice_rows = []
        chance_rows = []
        for state, names in enumerate(self.actions):
            if not names:
                continue
            first = offsets[state]
            if choices is None:
                successors = [first + k for k in range(len(names))]
            else:
                picked = choices[state]
                if picked is None or not 0 <= picked < len(names):
                    raise StrategyError(f"No valid action chosen for state {state}")
                successors = [first + picked]
            choice_rows.append((state, successors, mode is Mode.MAX))
            for k, distribution in enumerate(self.distributions[state]):
                chance_rows.append((first + k, [(t, float(p)) for t, p in distribution]))
        return compile_arena(self.num_nodes, choice_rows, chance_rows, self.final)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "initial": self.initial,
            "final": sorted(self.final),
            "states": [
                {
                    "id": index,
                    "values": state.as_dict(),
                    "actions": [
                        {
                            "command": name,
                            "distribution": {str(t): str(p) for t, p in distribution},
                        }
                        for name, distribution in zip(self.actions[index], self.distributions[index])
                    ],
                }
                for index, state in enumerate(self.states)
            ],
        }


@dataclass(frozen=True, slots=True)
class MdpSolution:
    """Per-state extremal reachability values and the memoryless choices attaining them."""

    mode: Mode
    values: Tuple[float, ...]
    choices: Tuple[Optional[int], ...]
    iterations: int
    residual: float

    def at(self, state: int) -> float:
        return self.values[state]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "values": list(self.values),
            "choices": list(self.choices),
            "iterations": self.iterations,
            "residual": self.residual,
        }


def build_mdp(program: Program, max_states: int) -> Mdp:
    """Breadth-first closure of the configurations reachable from the initial one."""
    init = program.init
    index: Dict[Configuration, int] = {init: 0}
    states: List[Configuration] = [init]
    actions: List[Tuple[str, ...]] = []
    distributions: List[Tuple[Distribution, ...]] = []
    final = set()
    queue: Deque[int] = deque([0])

    while queue:
        current = queue.popleft()
        config = states[current]
        if eval_guard(program.reach, config):
            final.add(current)
            actions.append(())
            distributions.append(())
            continue
        names: List[str] = []
        per_action: List[Distribution] = []
        for command in program.commands:
            if not eval_guard(command.guard, config):
                continue
            weights: Dict[int, Fraction] = {}
            for update in command.updates:
                successor = apply_assignment(update.assignment, config, program)
                target = index.get(successor)
                if target is None:
                    if len(states) >= max_states:
                        raise OracleInfeasibleError(
                            f"oracle infeasible: more than {max_states} reachable configurations"
                        )
                    target = len(states)
                    index[successor] = target
                    states.append(successor)
                    queue.append(target)
                weights[target] = weights.get(target, Fraction(0)) + update.probability
            names.append(command.name)
            per_action.append(tuple(sorted(weights.items())))
        if not names:
            names.append(IDLE_COMMAND)
            per_action.append(((current, Fraction(1)),))
        actions.append(tuple(names))
        distributions.append(tuple(per_action))

    mdp = Mdp(tuple(states), tuple(actions), tuple(distributions), 0, frozenset(final))
    LOGGER.debug(
        "Explored %d configurations (%d MDP nodes)", mdp.num_configurations, mdp.num_nodes
    )
    return mdp


def mdp_reach(mdp: Mdp, mode: Mode | str, tol: float, max_iters: int) -> MdpSolution:
    """Maximal or minimal probability of reaching a final state, from every state."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    mode = Mode(mode)
    arena = mdp.arena(mode)
    result = iterate(arena, tol, max_iters)
    picked = extract_choices(arena, result.values, max(10 * tol, 1e-12))
    offsets = mdp.action_offsets()
    choices = tuple(
        picked[state] - offsets[state] if state in picked else None
        for state in range(mdp.num_configurations)
    )
    values = tuple(float(v) for v in result.values[: mdp.num_configurations])
    return MdpSolution(mode, values, choices, result.iterations, result.residual)


def evaluate_policy(
    mdp: Mdp, choices: Sequence[Optional[int]], tol: float, max_iters: int
) -> Tuple[float, ...]:
    """Reachability values of the Markov chain induced by fixing one action per state."""
    result = iterate(mdp.arena(Mode.MAX, choices), tol, max_iters)
    return tuple(float(v) for v in result.values[: mdp.num_configurations])
