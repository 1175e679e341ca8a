from __future__ import annotations

import math

import pytest

from reach_bounds.core.errors import AnalysisConfigError, DomainMismatchError
from reach_bounds.core.models import Assignment, Atom, Comparison, Configuration, Guard, LinExpr
from reach_bounds.domains import (
    Congruence,
    CongruenceDomain,
    GuardStatus,
    IntervalDomain,
    ProductDomain,
    create_domain,
)

INF = math.inf
nrp = LinExpr.variable("nrp")
ctr = LinExpr.variable("ctr")


def _atom(expr: LinExpr, op: str, value: int) -> Atom:
    return Atom(expr, Comparison(op), LinExpr(value))


def test_interval_widening_pushes_unstable_bounds_to_infinity() -> None:
    domain = IntervalDomain(("nrp", "ctr"))
    loop_head = domain.box(nrp=(0, 0), ctr=(1, 1))
    successor = domain.box(nrp=(1, 100), ctr=(1, 1))
    widened = domain.widen(loop_head, domain.join(loop_head, successor))
    assert widened == domain.box(nrp=(0, INF), ctr=(1, 1))
    assert domain.render(widened) == "nrp:[0,+inf) ctr:[1,1]"
    assert domain.pinned_value(widened, "ctr") == 1
    assert domain.pinned_value(widened, "nrp") is None


def test_interval_guard_refinement_and_status() -> None:
    domain = IntervalDomain(("nrp", "ctr"))
    head = domain.box(nrp=(0, INF), ctr=(1, 1))
    enabled = Guard((_atom(ctr, "=", 1), _atom(nrp, "<", 100)))
    assert domain.meet_guard(head, enabled) == domain.box(nrp=(0, 99), ctr=(1, 1))
    assert domain.guard_status(head, enabled) is GuardStatus.MIXED
    assert domain.guard_status(head, Guard((_atom(ctr, "=", 2),))) is GuardStatus.EMPTY_CERTAIN
    assert domain.guard_status(head, Guard((_atom(nrp, ">=", 0),))) is GuardStatus.FULL_CERTAIN
    assert domain.guard_split(head, enabled) == (domain.box(nrp=(0, 99), ctr=(1, 1)),)
    assert domain.guard_split(head, Guard((_atom(ctr, "=", 2),))) == ()


def test_interval_relational_atom_propagates_bounds() -> None:
    domain = IntervalDomain(("c", "i"))
    box = domain.box(c=(-INF, 0), i=(101, INF))
    c_ge_i = Atom(LinExpr.variable("c"), Comparison.GE, LinExpr.variable("i"))
    assert domain.meet_atom(box, c_ge_i).is_bottom


def test_interval_assignment_uses_pre_state() -> None:
    domain = IntervalDomain(("x", "y"))
    box = domain.box(x=(0, 2), y=(5, 5))
    swapped = domain.assign_transform(
        box, Assignment.of({"x": LinExpr.variable("y"), "y": LinExpr.variable("x").scale(-3)})
    )
    assert swapped == domain.box(x=(5, 5), y=(-6, 0))


def test_final_overlap_for_packet_receiver_loop_exit() -> None:
    domain = IntervalDomain(("nrp", "ctr"))
    reach = Guard((_atom(ctr, "=", 3), _atom(nrp, "<", 1)))
    mixed = domain.final_overlap(domain.box(nrp=(0, 99), ctr=(3, 3)), reach)
    assert mixed.intersects and not mixed.contained
    inside = domain.final_overlap(domain.box(nrp=(0, 0), ctr=(3, 3)), reach)
    assert inside.intersects and inside.contained
    outside = domain.final_overlap(domain.box(nrp=(1, 99), ctr=(3, 3)), reach)
    assert not outside.intersects


def test_complement_split_covers_the_violating_part() -> None:
    domain = IntervalDomain(("x",))
    x = LinExpr.variable("x")
    pieces = domain.complement_split(domain.box(x=(0, 10)), Guard((_atom(x, "=", 4),)))
    assert set(pieces) == {domain.box(x=(0, 3)), domain.box(x=(5, 10))}
    assert domain.complement_split(domain.box(x=(4, 4)), Guard((_atom(x, "=", 4),))) == ()


def test_congruence_join_and_meet() -> None:
    assert Congruence.constant(1).join(Congruence.constant(6)) == Congruence(5, 1)
    assert Congruence.make(4, 1).meet(Congruence.make(6, 3)) == Congruence(12, 9)
    assert Congruence.make(4, 1).meet(Congruence.make(6, 2)) is None
    assert Congruence.make(3, 2).leq(Congruence(1, 0))
    assert not Congruence(1, 0).leq(Congruence.make(3, 2))


def test_congruence_tracks_strides_through_assignments() -> None:
    domain = CongruenceDomain(("a", "ctr"))
    a = LinExpr.variable("a")
    start = domain.grid(a=(0, 1), ctr=(0, 1))
    up = domain.assign_transform(start, Assignment.of({"a": a + LinExpr(5)}))
    down = domain.assign_transform(start, Assignment.of({"a": a - LinExpr(5)}))
    joined = domain.widen(up, domain.join(up, down))
    assert joined == domain.grid(a=(10, 6), ctr=(0, 1))
    assert domain.concrete_member(joined, Configuration(("a", "ctr"), (-4, 1)))
    assert domain.meet_atom(joined, _atom(a, "=", 1)).is_bottom
    assert domain.meet_atom(domain.grid(a=(5, 1)), _atom(a, "=", 1)) == domain.grid(a=(0, 1))
    assert domain.render(joined) == "a:(10,6) ctr:(0,1)"


def test_product_reduction_snaps_bounds_onto_the_class() -> None:
    domain = ProductDomain(("x",))
    pair = domain.pair(domain.intervals.box(x=(0, 10)), domain.congruences.grid(x=(5, 1)))
    assert pair.box == domain.intervals.box(x=(1, 6))
    single = domain.pair(domain.intervals.box(x=(2, 5)), domain.congruences.grid(x=(3, 1)))
    assert single.box == domain.intervals.box(x=(4, 4))
    assert single.grid == domain.congruences.grid(x=(0, 4))
    empty = domain.pair(domain.intervals.box(x=(2, 3)), domain.congruences.grid(x=(5, 0)))
    assert empty.is_bottom


def test_product_certainty_uses_either_component() -> None:
    domain = ProductDomain(("x",))
    x = LinExpr.variable("x")
    pair = domain.pair(domain.intervals.box(x=(-INF, INF)), domain.congruences.grid(x=(0, 7)))
    assert domain.atom_certain(pair, _atom(x, "<=", 7))
    assert domain.pinned_value(pair, "x") == 7
    stride = domain.pair(domain.intervals.box(x=(0, 100)), domain.congruences.grid(x=(3, 0)))
    assert domain.guard_status(stride, Guard((_atom(x, "=", 2),))) is GuardStatus.EMPTY_CERTAIN


def test_factory_and_mismatch_errors() -> None:
    assert create_domain("product", ("x",)).name == "product"
    with pytest.raises(AnalysisConfigError):
        create_domain("octagon", ("x",))
    intervals = IntervalDomain(("x",))
    congruences = CongruenceDomain(("x",))
    with pytest.raises(DomainMismatchError):
        intervals.join(intervals.top(), congruences.top())
    with pytest.raises(DomainMismatchError):
        intervals.join(intervals.top(), IntervalDomain(("y",)).top())
