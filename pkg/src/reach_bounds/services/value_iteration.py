"""Reachability value iteration shared by the concrete oracle and the game solver.

An :class:`Arena` is a flat, array-backed view of a finite graph whose nodes are either
choice nodes (maximizing or minimizing over successors), chance nodes (probability
weighted successors), targets (value 1) or sinks (value 0).
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Set, Tuple

import numpy as np

from reach_bounds.core.errors import ConvergenceError

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Arena:
    size: int
    choice_nodes: np.ndarray
    choice_offsets: np.ndarray
    choice_targets: np.ndarray
    maximizing: np.ndarray
    chance_nodes: np.ndarray
    chance_src: np.ndarray
    chance_dst: np.ndarray
    chance_prob: np.ndarray
    target: np.ndarray

    def choice_segments(self) -> Dict[int, Tuple[List[int], bool]]:
        """Successor list and player flag for every choice node."""
        ends = list(self.choice_offsets[1:]) + [len(self.choice_targets)]
        targets = self.choice_targets.tolist()
        return {
            int(node): (targets[start:end], bool(flag))
            for node, start, end, flag in zip(
                self.choice_nodes.tolist(), self.choice_offsets.tolist(), ends, self.maximizing
            )
        }


@dataclass(frozen=True)
class IterationResult:
    values: np.ndarray
    iterations: int
    residual: float


def compile_arena(
    size: int,
    choices: Sequence[Tuple[int, Sequence[int], bool]],
    chances: Sequence[Tuple[int, Sequence[Tuple[int, float]]]],
    targets: Iterable[int],
) -> Arena:
    """Pack adjacency lists into arrays.

    ``choices`` holds ``(node, successors, maximizing)`` with non-empty successor lists,
    ``chances`` holds ``(node, [(successor, probability), ...])``. Target nodes must not
    appear in either list.
    """
    target_mask = np.zeros(size, dtype=bool)
    target_mask[list(targets)] = True

    ordered = sorted(choices, key=lambda item: item[0])
    offsets: List[int] = []
    flat: List[int] = []
    for _, successors, _ in ordered:
        offsets.append(len(flat))
        flat.extend(successors)

    chance_nodes: List[int] = []
    src: List[int] = []
    dst: List[int] = []
    prob: List[float] = []
    for node, distribution in sorted(chances, key=lambda item: item[0]):
        chance_nodes.append(node)
        for successor, probability in distribution:
            src.append(node)
            dst.append(successor)
            prob.append(float(probability))

    return Arena(
        size=size,
        choice_nodes=np.array([node for node, _, _ in ordered], dtype=np.int64),
        choice_offsets=np.array(offsets, dtype=np.int64),
        choice_targets=np.array(flat, dtype=np.int64),
        maximizing=np.array([flag for _, _, flag in ordered], dtype=bool),
        chance_nodes=np.array(chance_nodes, dtype=np.int64),
        chance_src=np.array(src, dtype=np.int64),
        chance_dst=np.array(dst, dtype=np.int64),
        chance_prob=np.array(prob, dtype=np.float64),
        target=target_mask,
    )


def iterate(arena: Arena, tol: float, max_iters: int) -> IterationResult:
    """Jacobi value iteration from below until the sup-norm change drops under ``tol``."""
    values = arena.target.astype(np.float64)
    if arena.size == 0:
        return IterationResult(values, 0, 0.0)
    residual = 0.0
    for sweep in range(1, max_iters + 1):
        updated = values.copy()
        if arena.choice_nodes.size:
            gathered = values[arena.choice_targets]
            best = np.maximum.reduceat(gathered, arena.choice_offsets)
            worst = np.minimum.reduceat(gathered, arena.choice_offsets)
            updated[arena.choice_nodes] = np.where(arena.maximizing, best, worst)
        if arena.chance_nodes.size:
            weighted = np.bincount(
                arena.chance_src,
                weights=arena.chance_prob * values[arena.chance_dst],
                minlength=arena.size,
            )
            updated[arena.chance_nodes] = np.minimum(weighted[arena.chance_nodes], 1.0)
        updated[arena.target] = 1.0
        residual = float(np.max(np.abs(updated - values)))
        values = updated
        if residual < tol:
            LOGGER.debug("Value iteration converged after %d sweeps (residual %.3e)", sweep, residual)
            return IterationResult(values, sweep, residual)
    raise ConvergenceError(max_iters, residual, values.tolist())


def extract_choices(arena: Arena, values: np.ndarray, eps: float) -> Dict[int, int]:
    """Memoryless choice per choice node attaining ``values``.

    Minimizers take the lowest-index successor within ``eps`` of the minimum. Maximizers
    are restricted to value-optimal successors and resolved by backward layers from the
    targets, so the chosen successor always makes progress towards a target; inside a
    layer the lowest-index successor wins.
    """
    segments = arena.choice_segments()
    choice: Dict[int, int] = {}
    optimal: Dict[int, List[int]] = {}
    predecessors: Dict[int, List[int]] = defaultdict(list)

    for node, (successors, maximizing) in segments.items():
        scores = [float(values[t]) for t in successors]
        if maximizing:
            best = max(scores)
            optimal[node] = [t for t, v in zip(successors, scores) if v >= best - eps]
            for successor in optimal[node]:
                predecessors[successor].append(node)
        else:
            worst = min(scores)
            choice[node] = next(t for t, v in zip(successors, scores) if v <= worst + eps)
            predecessors[choice[node]].append(node)

    for source, destination, probability in zip(
        arena.chance_src.tolist(), arena.chance_dst.tolist(), arena.chance_prob.tolist()
    ):
        if probability > 0.0:
            predecessors[destination].append(source)

    attracted: Set[int] = set(np.flatnonzero(arena.target).tolist())
    frontier = sorted(attracted)
    while frontier:
        layer: Set[int] = set()
        for node in frontier:
            layer.update(p for p in predecessors.get(node, ()) if p not in attracted)
        for node in sorted(layer):
            if node in optimal:
                choice[node] = min(t for t in optimal[node] if t in attracted)
        attracted.update(layer)
        frontier = sorted(layer)

    for node, candidates in optimal.items():
        choice.setdefault(node, candidates[0])
    return choice
