from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

import pytest

from reach_bounds.core.game import DelayConfig, NodeKind, WidenKey
from reach_bounds.domains import create_domain
from reach_bounds.services.game_builder import build_game
from reach_bounds.services.validity import ValidityCondition, check_validity, enumerate_window

INF = math.inf
AUDITED = ["packet_receiver_clipped", "parity_walk_clipped", "triple_shift_clipped", "coin_count_loop_clipped", "self_loop"]
DELAYS = {
    "command": DelayConfig(),
    "update-up-to": DelayConfig(widen_key=WidenKey.parse("update"), up_to_guards=True),
    "depth-2": DelayConfig(depth_threshold=2),
}


@pytest.fixture
def clipped(load_fixture):
    program = load_fixture("packet_receiver_clipped")
    domain = create_domain("interval", program.variables)
    game = build_game(program, domain, DelayConfig(widen_key=WidenKey("ctr")))
    return program, domain, game


def _node_with(game, element):
    return next(i for i, n in enumerate(game.nodes) if n.kind is NodeKind.PLAYER1 and n.element == element)


def _proposal(game, node, command):
    return next(p for p in game.successors(node) if game.nodes[p].command == command)


def _without_edge(game, source, target):
    edges = list(game.edges)
    edges[source] = tuple(t for t in edges[source] if t != target)
    return dataclasses.replace(game, edges=tuple(edges))


def test_constructed_game_passes_the_audit(clipped) -> None:
    program, domain, game = clipped
    report = check_validity(game, program, domain)
    assert report.ok, [v.render() for v in report.violations]
    assert report.checked_nodes == game.player1_count
    assert report.window_size == 121 * 3
    assert not report.sampled


@pytest.mark.parametrize("delay_name", sorted(DELAYS))
@pytest.mark.parametrize("domain_name", ["interval", "congruence", "product"])
@pytest.mark.parametrize("name", AUDITED)
def test_every_fixture_passes_the_audit(load_fixture, name, domain_name, delay_name) -> None:
    program = load_fixture(name)
    domain = create_domain(domain_name, program.variables)
    game = build_game(program, domain, DELAYS[delay_name])
    report = check_validity(game, program, domain)
    assert report.ok, [v.render() for v in report.violations]
    assert report.checked_nodes == game.player1_count
    assert not report.sampled


def test_trivial_program_passes(load_fixture) -> None:
    program = load_fixture("one_shot")
    domain = create_domain("interval", program.variables)
    report = check_validity(build_game(program, domain), program, domain)
    assert report.ok
    assert report.window_size == 33


def test_missing_reject_edge_is_reported(clipped) -> None:
    program, domain, game = clipped
    loop_head = _node_with(game, domain.box(nrp=(0, INF), ctr=(1, 1)))
    proposal = _proposal(game, loop_head, "A1")
    broken = _without_edge(game, proposal, game.reject)
    report = check_validity(broken, program, domain)
    assert ValidityCondition.REJECT_EDGE in report.conditions()
    assert all(v.node in (loop_head, proposal) for v in report.violations)


def test_missing_accept_edge_is_reported(clipped) -> None:
    program, domain, game = clipped
    exit_node = _node_with(game, domain.box(nrp=(0, 99), ctr=(3, 3)))
    proposal = _proposal(game, exit_node, "A5")
    report = check_validity(_without_edge(game, proposal, game.accept), program, domain)
    assert ValidityCondition.ACCEPT_EDGE in report.conditions()


def test_wrong_successor_is_reported(clipped) -> None:
    program, domain, game = clipped
    (proposal,) = game.successors(game.start)
    (outcome,) = game.successors(proposal)
    failed = _node_with(game, domain.box(nrp=(0, 0), ctr=(2, 2)))
    elsewhere = _node_with(game, domain.box(nrp=(0, 0), ctr=(3, 3)))

    node = game.nodes[outcome]
    targets = tuple(elsewhere if t == failed else t for t in node.targets)
    nodes = list(game.nodes)
    nodes[outcome] = dataclasses.replace(node, targets=targets)
    distributions = list(game.distributions)
    distributions[outcome] = tuple(
        sorted((elsewhere if t == failed else t, p) for t, p in game.distributions[outcome])
    )
    broken = dataclasses.replace(game, nodes=tuple(nodes), distributions=tuple(distributions))

    report = check_validity(broken, program, domain)
    assert report.conditions() == {ValidityCondition.SUCCESSOR}
    (violation,) = report.violations
    assert violation.node == outcome
    assert "escapes node" in violation.render()


def test_broken_distribution_is_reported(clipped) -> None:
    program, domain, game = clipped
    (proposal,) = game.successors(game.start)
    (outcome,) = game.successors(proposal)
    distributions = list(game.distributions)
    distributions[outcome] = tuple((t, Fraction(1, 2)) for t, _ in game.distributions[outcome])
    report = check_validity(dataclasses.replace(game, distributions=tuple(distributions)), program, domain)
    assert ValidityCondition.DISTRIBUTION in report.conditions()


def test_large_windows_are_sampled_reproducibly(load_fixture) -> None:
    program = load_fixture("coin_count_loop")
    first, sampled = enumerate_window(program, sample_budget=500)
    second, _ = enumerate_window(program, sample_budget=500)
    assert sampled
    assert first == second
    assert program.init in first
    assert len(first) <= 501
