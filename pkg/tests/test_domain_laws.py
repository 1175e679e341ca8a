"""Lattice laws and transformer soundness for every domain, checked by brute force on a window."""
from __future__ import annotations

import itertools
import math
from typing import List

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reach_bounds.core.evaluation import apply_assignment, eval_atom, eval_guard
from reach_bounds.core.models import Assignment, Atom, Comparison, Configuration, Guard, LinExpr
from reach_bounds.domains import AbstractDomain, GuardStatus, create_domain

VARIABLES = ("x", "y")
WINDOW = [
    Configuration(VARIABLES, values) for values in itertools.product(range(-8, 9), repeat=2)
]
DOMAINS = {name: create_domain(name, VARIABLES) for name in ("interval", "congruence", "product")}
CHAIN_LIMIT = 24

LAWS = settings(max_examples=1000, deadline=None)
SOUNDNESS = settings(max_examples=300, deadline=None)

domain_names = pytest.mark.parametrize("name", sorted(DOMAINS))


@st.composite
def intervals(draw):
    lo = draw(st.one_of(st.none(), st.integers(-10, 10)))
    hi = draw(st.one_of(st.none(), st.integers(-10, 10)))
    lo = -math.inf if lo is None else lo
    hi = math.inf if hi is None else hi
    return (min(lo, hi), max(lo, hi))


@st.composite
def classes(draw):
    return (draw(st.integers(0, 6)), draw(st.integers(-10, 10)))


@st.composite
def elements(draw, domain: AbstractDomain):
    if draw(st.integers(0, 19)) == 0:
        return domain.bottom()
    if domain.name == "interval":
        return domain.box(**{name: draw(intervals()) for name in VARIABLES})
    if domain.name == "congruence":
        return domain.grid(**{name: draw(classes()) for name in VARIABLES})
    box = domain.intervals.box(**{name: draw(intervals()) for name in VARIABLES})
    grid = domain.congruences.grid(**{name: draw(classes()) for name in VARIABLES})
    return domain.pair(box, grid)


@st.composite
def expressions(draw):
    coefficients = {name: draw(st.integers(-3, 3)) for name in VARIABLES}
    return LinExpr.of(draw(st.integers(-8, 8)), coefficients)


@st.composite
def atoms(draw):
    return Atom(draw(expressions()), draw(st.sampled_from(list(Comparison))), LinExpr(draw(st.integers(-4, 4))))


@st.composite
def guards(draw):
    return Guard(tuple(draw(st.lists(atoms(), min_size=1, max_size=3))))


@st.composite
def assignments(draw):
    targets = draw(st.sets(st.sampled_from(VARIABLES), min_size=1))
    return Assignment.of({name: draw(expressions()) for name in sorted(targets)})


def members(domain: AbstractDomain, element) -> List[Configuration]:
    return [config for config in WINDOW if domain.concrete_member(element, config)]


@domain_names
@LAWS
@given(data=st.data())
def test_join_meet_and_widen_bounds(name: str, data) -> None:
    domain = DOMAINS[name]
    a = data.draw(elements(domain))
    b = data.draw(elements(domain))
    joined = domain.join(a, b)
    widened = domain.widen(a, b)
    met = domain.meet(a, b)

    assert domain.leq(a, a)
    assert domain.leq(a, joined) and domain.leq(b, joined)
    assert domain.equal(joined, domain.join(b, a))
    assert domain.leq(joined, widened)
    assert domain.leq(met, a) and domain.leq(met, b)
    assert domain.leq(domain.bottom(), a) and domain.leq(a, domain.top())


@domain_names
@LAWS
@given(data=st.data())
def test_widening_chains_stabilise(name: str, data) -> None:
    domain = DOMAINS[name]
    sequence = data.draw(st.lists(elements(domain), min_size=1, max_size=40))
    current = domain.bottom()
    changes = 0
    for element in sequence:
        following = domain.widen(current, domain.join(current, element))
        assert domain.leq(current, following)
        if following != current:
            changes += 1
        current = following
    assert changes <= CHAIN_LIMIT


@domain_names
@SOUNDNESS
@given(data=st.data())
def test_order_agrees_with_concretisation(name: str, data) -> None:
    domain = DOMAINS[name]
    a = data.draw(elements(domain))
    b = data.draw(elements(domain))
    inside_a = members(domain, a)
    for config in inside_a:
        assert domain.concrete_member(domain.abstract_singleton(config), config)
        assert domain.concrete_member(domain.join(a, b), config)
    if domain.leq(a, b):
        assert all(domain.concrete_member(b, config) for config in inside_a)
    inside_both = [config for config in inside_a if domain.concrete_member(b, config)]
    assert all(domain.concrete_member(domain.meet(a, b), config) for config in inside_both)


@domain_names
@SOUNDNESS
@given(data=st.data())
def test_assignment_transformer_is_sound(name: str, data) -> None:
    domain = DOMAINS[name]
    a = data.draw(elements(domain))
    assignment = data.draw(assignments())
    image = domain.assign_transform(a, assignment)
    for config in members(domain, a):
        post = apply_assignment(assignment, config, check_ranges=False)
        assert domain.concrete_member(image, post)


@domain_names
@SOUNDNESS
@given(data=st.data())
def test_atom_refinement_and_certainty_are_sound(name: str, data) -> None:
    domain = DOMAINS[name]
    a = data.draw(elements(domain))
    atom = data.draw(atoms())
    refined = domain.meet_atom(a, atom)
    certain = domain.atom_certain(a, atom)
    for config in members(domain, a):
        holds = eval_atom(atom, config)
        if holds:
            assert domain.concrete_member(refined, config)
        if certain:
            assert holds


@domain_names
@SOUNDNESS
@given(data=st.data())
def test_guard_status_and_complement_cover(name: str, data) -> None:
    domain = DOMAINS[name]
    a = data.draw(elements(domain))
    guard = data.draw(guards())
    status = domain.guard_status(a, guard)
    pieces = domain.complement_split(a, guard)
    overlap = domain.final_overlap(a, guard)
    for config in members(domain, a):
        holds = eval_guard(guard, config)
        if status is GuardStatus.EMPTY_CERTAIN:
            assert not holds
        if status is GuardStatus.FULL_CERTAIN or overlap.contained:
            assert holds
        if holds:
            assert overlap.intersects
            assert any(domain.concrete_member(piece, config) for piece in domain.guard_split(a, guard))
        else:
            assert any(domain.concrete_member(piece, config) for piece in pieces)
