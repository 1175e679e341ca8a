"""Audit a built game against the structural and semantic validity conditions.

Structural conditions are checked exactly from the domain's own answers. Semantic
containments are checked by enumerating concrete configurations inside a finite window
spanned by the declared variable ranges (or by a seeded sample of that window when it
is larger than the sample budget).
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from reach_bounds.core.errors import ReachBoundsError
from reach_bounds.core.evaluation import apply_assignment, eval_guard
from reach_bounds.core.game import Game, NodeKind
from reach_bounds.core.models import IDENTITY, IDLE_COMMAND, Configuration, Program, Update
from reach_bounds.domains.base import AbstractDomain, AbstractElement, GuardStatus

LOGGER = logging.getLogger(__name__)

DEFAULT_SAMPLE_BUDGET = 10_000
# Half-width of the window used for variables declared without a range.
UNRANGED_RADIUS = 16
SAMPLE_SEED = 0


class ValidityCondition(str, Enum):
    START = "start"
    FINAL_PROPOSAL = "1a"
    COMMAND_PROPOSAL = "1b"
    COVERAGE = "2a"
    ACCEPT_EDGE = "2b"
    REJECT_EDGE = "2c"
    DISTRIBUTION = "3"
    TERMINAL = "4"
    REFINED = "Vp-refined"
    SUCCESSOR = "Vp-d"


@dataclass(frozen=True, slots=True)
class Violation:
    node: int
    condition: ValidityCondition
    message: str

    def render(self) -> str:
        return f"node {self.node}: [{self.condition.value}] {self.message}"


@dataclass(slots=True)
class ValidityReport:
    """Outcome of :func:`check_validity`; empty ``violations`` means the game passed."""

    violations: List[Violation] = field(default_factory=list)
    checked_nodes: int = 0
    window_size: int = 0
    sampled: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def conditions(self) -> set:
        return {violation.condition for violation in self.violations}

    def as_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "checked_nodes": self.checked_nodes,
            "window_size": self.window_size,
            "sampled": self.sampled,
            "violations": [
                {"node": v.node, "condition": v.condition.value, "message": v.message}
                for v in self.violations
            ],
        }


@dataclass(frozen=True, slots=True)
class _CommandView:
    enabled: Callable[[Configuration], bool]
    updates: Tuple[Update, ...]


def _safe(predicate: Callable[[Configuration], bool]) -> Callable[[Configuration], bool]:
    def wrapped(config: Configuration) -> bool:
        try:
            return predicate(config)
        except ReachBoundsError:
            return False

    return wrapped


def _command_views(program: Program) -> Dict[str, _CommandView]:
    views: Dict[str, _CommandView] = {
        command.name: _CommandView(
            _safe(lambda config, guard=command.guard: eval_guard(guard, config)),
            command.updates,
        )
        for command in program.commands
    }

    def idle(config: Configuration) -> bool:
        if eval_guard(program.reach, config):
            return False
        return not any(view.enabled(config) for view in views.values())

    views[IDLE_COMMAND] = _CommandView(_safe(idle), (Update(Fraction(1), IDENTITY),))
    return views


def enumerate_window(program: Program, sample_budget: int) -> Tuple[List[Configuration], bool]:
    """Concrete configurations the semantic checks range over, and whether they were sampled."""
    names = program.variables
    ranges = program.ranges
    spans: List[Tuple[int, int]] = []
    for decl in program.decls:
        bounds = ranges.get(decl.name)
        spans.append(bounds or (decl.init - UNRANGED_RADIUS, decl.init + UNRANGED_RADIUS))
    size = 1
    for lo, hi in spans:
        size *= hi - lo + 1
    if size <= sample_budget:
        axes = [range(lo, hi + 1) for lo, hi in spans]
        return [Configuration(names, values) for values in itertools.product(*axes)], False

    rng = np.random.default_rng(SAMPLE_SEED)
    columns = [rng.integers(lo, hi, endpoint=True, size=sample_budget) for lo, hi in spans]
    sample = {program.init}
    sample.update(
        Configuration(names, tuple(int(column[i]) for column in columns))
        for i in range(sample_budget)
    )
    return sorted(sample, key=lambda config: config.values), True


class _Auditor:
    def __init__(
        self,
        game: Game,
        program: Program,
        domain: AbstractDomain,
        window: Sequence[Configuration],
    ) -> None:
        self.game = game
        self.program = program
        self.domain = domain
        self.window = window
        self.views = _command_views(program)
        self.report = ValidityReport()
        self._members: Dict[AbstractElement, List[Configuration]] = {}

    def flag(self, node: int, condition: ValidityCondition, message: str) -> None:
        self.report.violations.append(Violation(node, condition, message))

    def members(self, element: AbstractElement) -> List[Configuration]:
        cached = self._members.get(element)
        if cached is None:
            cached = [c for c in self.window if self.domain.concrete_member(element, c)]
            self._members[element] = cached
        return cached

    def is_final(self, config: Configuration) -> bool:
        return _safe(lambda c: eval_guard(self.program.reach, c))(config)

    # -- checks ----------------------------------------------------------------------
    def run(self) -> ValidityReport:
        game = self.game
        start = game.nodes[game.start]
        expected = self.domain.abstract_singleton(self.program.init)
        if start.kind is not NodeKind.PLAYER1 or start.element != expected:
            self.flag(game.start, ValidityCondition.START, "start node is not the abstract initial state")
        for terminal in (game.accept, game.reject):
            if game.successors(terminal):
                self.flag(terminal, ValidityCondition.TERMINAL, "terminal node has outgoing edges")
        for node in game.nodes_of(NodeKind.PLAYER1):
            self.report.checked_nodes += 1
            self.check_player1(node)
        for node in game.nodes_of(NodeKind.PROBABILISTIC):
            self.check_probabilistic(node)
        return self.report

    def check_player1(self, node: int) -> None:
        game = self.game
        element = game.nodes[node].element
        members = self.members(element)
        children = game.successors(node)
        finals = [c for c in children if game.nodes[c].kind is NodeKind.PLAYER2_FINAL]
        proposals = {
            game.nodes[c].command: c
            for c in children
            if game.nodes[c].kind is NodeKind.PLAYER2_COMMAND
        }

        overlap = self.domain.final_overlap(element, self.program.reach)
        has_final_member = any(self.is_final(config) for config in members)
        if overlap.intersects or has_final_member:
            if len(finals) != 1 or game.accept not in game.successors(finals[0]):
                self.flag(node, ValidityCondition.FINAL_PROPOSAL, "missing s -> <s,accept> -> accept")
                return
            final = finals[0]
            if overlap.contained:
                if children != (final,):
                    self.flag(node, ValidityCondition.FINAL_PROPOSAL, "final proposal is not the only successor")
                if any(not self.is_final(config) for config in members):
                    self.flag(node, ValidityCondition.FINAL_PROPOSAL, "non-final member below a final-only node")
                return
            if final not in game.successors(final):
                self.flag(node, ValidityCondition.FINAL_PROPOSAL, "missing self-loop on <s,accept>")
        elif finals:
            self.flag(node, ValidityCondition.FINAL_PROPOSAL, "final proposal without final members")

        for command in self.program.commands:
            status = self.domain.guard_status(element, command.guard)
            if status is not GuardStatus.EMPTY_CERTAIN and command.name not in proposals:
                self.flag(
                    node,
                    ValidityCondition.COMMAND_PROPOSAL,
                    f"command {command.name} may be enabled but is not proposed",
                )
            elif status is not GuardStatus.FULL_CERTAIN and command.name in proposals:
                if game.reject not in game.successors(proposals[command.name]):
                    self.flag(
                        proposals[command.name],
                        ValidityCondition.REJECT_EDGE,
                        f"command {command.name} is not certainly enabled but has no reject edge",
                    )

        for name, view in self.views.items():
            enabling = [config for config in members if view.enabled(config)]
            proposal = proposals.get(name)
            if proposal is None:
                if enabling:
                    self.flag(
                        node,
                        ValidityCondition.COMMAND_PROPOSAL,
                        f"{name} is enabled at {enabling[0].render()} but not proposed",
                    )
                continue
            self.check_proposal(proposal, name, view, members, enabling, has_final_member)

    def check_proposal(
        self,
        proposal: int,
        name: str,
        view: _CommandView,
        members: Sequence[Configuration],
        enabling: Sequence[Configuration],
        has_final_member: bool,
    ) -> None:
        game = self.game
        successors = game.successors(proposal)
        if has_final_member and game.accept not in successors:
            self.flag(proposal, ValidityCondition.ACCEPT_EDGE, f"{name}: final member but no accept edge")
        if len(enabling) < len(members) and game.reject not in successors:
            self.flag(proposal, ValidityCondition.REJECT_EDGE, f"{name}: disabled member but no reject edge")
        refined = [
            game.nodes[s].refined for s in successors if game.nodes[s].kind is NodeKind.PROBABILISTIC
        ]
        for config in enabling:
            if not any(self.domain.concrete_member(r, config) for r in refined):
                self.flag(
                    proposal,
                    ValidityCondition.COVERAGE,
                    f"{name}: enabled member {config.render()} is not covered by any branch",
                )
                break

    def check_probabilistic(self, node: int) -> None:
        game = self.game
        prob = game.nodes[node]
        owner = game.nodes[prob.owner].element
        view = self.views.get(prob.command)
        if view is None:
            self.flag(node, ValidityCondition.DISTRIBUTION, f"unknown command {prob.command}")
            return
        if not self.domain.leq(prob.refined, owner):
            self.flag(node, ValidityCondition.REFINED, "refined element is not below its owner")

        distribution = game.distribution(node)
        expected: Dict[int, Fraction] = {}
        for target, update in zip(prob.targets, view.updates):
            expected[target] = expected.get(target, Fraction(0)) + update.probability
        if (
            len(prob.targets) != len(view.updates)
            or sum(distribution.values(), Fraction(0)) != 1
            or distribution != expected
        ):
            self.flag(node, ValidityCondition.DISTRIBUTION, "distribution does not match the updates")

        for target, update in zip(prob.targets, view.updates):
            successor = game.nodes[target].element
            for config in self.members(prob.refined):
                try:
                    image = apply_assignment(update.assignment, config, check_ranges=False)
                except ReachBoundsError:
                    continue
                if not self.domain.concrete_member(successor, image):
                    self.flag(
                        node,
                        ValidityCondition.SUCCESSOR,
                        f"{config.render()} -> {image.render()} escapes node {target}",
                    )
                    break


def check_validity(
    game: Game,
    program: Program,
    domain: AbstractDomain,
    sample_budget: int = DEFAULT_SAMPLE_BUDGET,
) -> ValidityReport:
    """Check every validity condition on ``game``; violations name node and condition."""
    window, sampled = enumerate_window(program, sample_budget)
    auditor = _Auditor(game, program, domain, window)
    report = auditor.run()
    report.window_size = len(window)
    report.sampled = sampled
    if report.violations:
        LOGGER.warning("Validity audit found %d violations", len(report.violations))
    else:
        LOGGER.debug("Validity audit passed on %d Player-1 nodes", report.checked_nodes)
    return report
