"""Reduced product of intervals and congruences."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from reach_bounds.core.models import Assignment, Atom, Configuration
from reach_bounds.domains.base import AbstractDomain, AbstractElement
from reach_bounds.domains.congruence import Congruence, CongruenceDomain, CongruenceMap
from reach_bounds.domains.interval import NEG_INF, POS_INF, Interval, IntervalBox, IntervalDomain


@dataclass(frozen=True, slots=True)
class ProductPair(AbstractElement):
    """An interval box and a congruence map describing the same variables, kept reduced."""

    variables: Tuple[str, ...]
    box: IntervalBox
    grid: CongruenceMap

    @property
    def is_bottom(self) -> bool:
        return self.box.is_bottom


def _reduce_variable(
    interval: Interval, cls: Congruence
) -> Optional[Tuple[Interval, Congruence]]:
    """Exchange singleton facts and snap finite bounds onto the congruence class."""
    if cls.is_constant:
        if not interval.contains(cls.residue):
            return None
        return Interval.point(cls.residue), cls
    lo, hi = interval.lo, interval.hi
    if lo != NEG_INF:
        lo = lo + (cls.residue - lo) % cls.modulus
    if hi != POS_INF:
        hi = hi - (hi - cls.residue) % cls.modulus
    if lo > hi:
        return None
    if lo == hi:
        return Interval.point(int(lo)), Congruence.constant(int(lo))
    return Interval(lo, hi), cls


class ProductDomain(AbstractDomain):
    """Componentwise operations followed by reduction."""

    name = "product"
    element_type = ProductPair

    def __init__(self, variables: Sequence[str]) -> None:
        super().__init__(variables)
        self.intervals = IntervalDomain(self._variables)
        self.congruences = CongruenceDomain(self._variables)
        self._bottom = ProductPair(
            self._variables, self.intervals.bottom(), self.congruences.bottom()
        )

    def reduce(self, box: IntervalBox, grid: CongruenceMap) -> ProductPair:
        if box.bounds is None or grid.classes is None:
            return self._bottom
        intervals: List[Interval] = []
        classes: List[Congruence] = []
        for interval, cls in zip(box.bounds, grid.classes):
            reduced = _reduce_variable(interval, cls)
            if reduced is None:
                return self._bottom
            intervals.append(reduced[0])
            classes.append(reduced[1])
        return ProductPair(
            self._variables,
            IntervalBox(self._variables, tuple(intervals)),
            CongruenceMap(self._variables, tuple(classes)),
        )

    def pair(self, box: IntervalBox, grid: CongruenceMap) -> ProductPair:
        """Public constructor; always returns a reduced element."""
        self.intervals.check(box)
        self.congruences.check(grid)
        return self.reduce(box, grid)

    def bottom(self) -> ProductPair:
        return self._bottom

    def top(self) -> ProductPair:
        return ProductPair(self._variables, self.intervals.top(), self.congruences.top())

    def leq(self, a: ProductPair, b: ProductPair) -> bool:
        self.check(a, b)
        if a.is_bottom:
            return True
        if b.is_bottom:
            return False
        return self.intervals.leq(a.box, b.box) and self.congruences.leq(a.grid, b.grid)

    def join(self, a: ProductPair, b: ProductPair) -> ProductPair:
        self.check(a, b)
        if a.is_bottom:
            return b
        if b.is_bottom:
            return a
        return self.reduce(self.intervals.join(a.box, b.box), self.congruences.join(a.grid, b.grid))

    def meet(self, a: ProductPair, b: ProductPair) -> ProductPair:
        self.check(a, b)
        return self.reduce(self.intervals.meet(a.box, b.box), self.congruences.meet(a.grid, b.grid))

    def widen(self, a: ProductPair, b: ProductPair) -> ProductPair:
        self.check(a, b)
        if a.is_bottom:
            return b
        if b.is_bottom:
            return a
        return self.reduce(
            self.intervals.widen(a.box, b.box), self.congruences.widen(a.grid, b.grid)
        )

    def abstract_singleton(self, config: Configuration) -> ProductPair:
        return ProductPair(
            self._variables,
            self.intervals.abstract_singleton(config),
            self.congruences.abstract_singleton(config),
        )

    def concrete_member(self, a: ProductPair, config: Configuration) -> bool:
        self.check(a)
        return self.intervals.concrete_member(a.box, config) and self.congruences.concrete_member(
            a.grid, config
        )

    def pinned_value(self, a: ProductPair, variable: str) -> Optional[int]:
        self.check(a)
        return self.intervals.pinned_value(a.box, variable)

    def assign_transform(self, a: ProductPair, assignment: Assignment) -> ProductPair:
        self.check(a)
        if a.is_bottom:
            return a
        return self.reduce(
            self.intervals.assign_transform(a.box, assignment),
            self.congruences.assign_transform(a.grid, assignment),
        )

    def meet_atom(self, a: ProductPair, atom: Atom) -> ProductPair:
        self.check(a)
        if a.is_bottom:
            return a
        return self.reduce(
            self.intervals.meet_atom(a.box, atom), self.congruences.meet_atom(a.grid, atom)
        )

    def atom_certain(self, a: ProductPair, atom: Atom) -> bool:
        self.check(a)
        if a.is_bottom:
            return True
        return self.intervals.atom_certain(a.box, atom) or self.congruences.atom_certain(
            a.grid, atom
        )

    def render(self, a: ProductPair) -> str:
        self.check(a)
        if a.is_bottom:
            return "bottom"
        return f"{self.intervals.render(a.box)} | {self.congruences.render(a.grid)}"
