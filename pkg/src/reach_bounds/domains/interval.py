"""Interval boxes with the classical widening."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from reach_bounds.core.models import (
    INT64_MAX,
    INT64_MIN,
    Assignment,
    Atom,
    Configuration,
    LinExpr,
)
from reach_bounds.domains.base import AbstractDomain, AbstractElement, upper_forms

NEG_INF = -math.inf
POS_INF = math.inf

Bound = Union[int, float]


def _floor_div(numerator: int, denominator: int) -> int:
    return numerator // denominator


def _ceil_div(numerator: int, denominator: int) -> int:
    return -((-numerator) // denominator)


@dataclass(frozen=True, slots=True)
class Interval:
    """Integer interval; ``lo`` may be -inf and ``hi`` may be +inf, never empty."""

    lo: Bound
    hi: Bound

    @classmethod
    def point(cls, value: int) -> "Interval":
        return cls(value, value)

    @classmethod
    def clamped(cls, lo: Bound, hi: Bound) -> "Interval":
        """Forget finite bounds that left the 64-bit range."""
        return cls(NEG_INF if lo < INT64_MIN else lo, POS_INF if hi > INT64_MAX else hi)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: int) -> bool:
        return self.lo <= value <= self.hi

    def leq(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def join(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def meet(self, other: "Interval") -> Optional["Interval"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def widen(self, other: "Interval") -> "Interval":
        lo = self.lo if other.lo >= self.lo else NEG_INF
        hi = self.hi if other.hi <= self.hi else POS_INF
        return Interval(lo, hi)

    def scale(self, factor: int) -> "Interval":
        if factor >= 0:
            return Interval(self.lo * factor, self.hi * factor) if factor else Interval(0, 0)
        return Interval(self.hi * factor, self.lo * factor)

    def render(self) -> str:
        left = "(-inf" if self.lo == NEG_INF else f"[{self.lo}"
        right = "+inf)" if self.hi == POS_INF else f"{self.hi}]"
        return f"{left},{right}"


TOP_INTERVAL = Interval(NEG_INF, POS_INF)


@dataclass(frozen=True, slots=True)
class IntervalBox(AbstractElement):
    """One interval per variable; ``bounds is None`` encodes bottom."""

    variables: Tuple[str, ...]
    bounds: Optional[Tuple[Interval, ...]]

    @property
    def is_bottom(self) -> bool:
        return self.bounds is None


class IntervalDomain(AbstractDomain):
    """Non-relational intervals; relational atoms get one round of bound propagation."""

    name = "interval"
    element_type = IntervalBox

    def __init__(self, variables: Sequence[str]) -> None:
        super().__init__(variables)
        self._bottom = IntervalBox(self._variables, None)
        self._top = IntervalBox(self._variables, tuple(TOP_INTERVAL for _ in self._variables))

    def box(self, **bounds: Tuple[Bound, Bound]) -> IntervalBox:
        """Build an element from keyword bounds; unnamed variables are unconstrained."""
        return IntervalBox(
            self._variables,
            tuple(Interval(*bounds[name]) if name in bounds else TOP_INTERVAL for name in self._variables),
        )

    def bottom(self) -> IntervalBox:
        return self._bottom

    def top(self) -> IntervalBox:
        return self._top

    def leq(self, a: IntervalBox, b: IntervalBox) -> bool:
        self.check(a, b)
        if a.bounds is None:
            return True
        if b.bounds is None:
            return False
        return all(x.leq(y) for x, y in zip(a.bounds, b.bounds))

    def join(self, a: IntervalBox, b: IntervalBox) -> IntervalBox:
        self.check(a, b)
        if a.bounds is None:
            return b
        if b.bounds is None:
            return a
        return IntervalBox(self._variables, tuple(x.join(y) for x, y in zip(a.bounds, b.bounds)))

    def meet(self, a: IntervalBox, b: IntervalBox) -> IntervalBox:
        self.check(a, b)
        if a.bounds is None or b.bounds is None:
            return self._bottom
        met = []
        for x, y in zip(a.bounds, b.bounds):
            both = x.meet(y)
            if both is None:
                return self._bottom
            met.append(both)
        return IntervalBox(self._variables, tuple(met))

    def widen(self, a: IntervalBox, b: IntervalBox) -> IntervalBox:
        self.check(a, b)
        if a.bounds is None:
            return b
        if b.bounds is None:
            return a
        return IntervalBox(self._variables, tuple(x.widen(y) for x, y in zip(a.bounds, b.bounds)))

    def abstract_singleton(self, config: Configuration) -> IntervalBox:
        return IntervalBox(
            self._variables, tuple(Interval.point(config[name]) for name in self._variables)
        )

    def concrete_member(self, a: IntervalBox, config: Configuration) -> bool:
        self.check(a)
        if a.bounds is None:
            return False
        return all(iv.contains(config[name]) for name, iv in zip(self._variables, a.bounds))

    def pinned_value(self, a: IntervalBox, variable: str) -> Optional[int]:
        self.check(a)
        if a.bounds is None:
            return None
        interval = a.bounds[self._index[variable]]
        return int(interval.lo) if interval.is_point else None

    def interval_of(self, bounds: Sequence[Interval], expr: LinExpr) -> Interval:
        """Range of ``expr`` over a box, by interval arithmetic."""
        lo: Bound = expr.constant
        hi: Bound = expr.constant
        for name, coefficient in expr.terms:
            scaled = bounds[self._index[name]].scale(coefficient)
            lo += scaled.lo
            hi += scaled.hi
        return Interval(lo, hi)

    def assign_transform(self, a: IntervalBox, assignment: Assignment) -> IntervalBox:
        self.check(a)
        if a.bounds is None or not assignment.targets:
            return a
        updated = list(a.bounds)
        for name, expr in assignment.targets:
            value = self.interval_of(a.bounds, expr)
            updated[self._index[name]] = Interval.clamped(value.lo, value.hi)
        return IntervalBox(self._variables, tuple(updated))

    def _propagate(self, bounds: List[Interval], form: LinExpr) -> bool:
        """Tighten ``bounds`` with ``form <= 0``; False when the constraint is unsatisfiable."""
        if form.is_constant:
            return form.constant <= 0
        for name, coefficient in form.terms:
            rest: Bound = form.constant
            for other, other_coeff in form.terms:
                if other != name:
                    rest += bounds[self._index[other]].scale(other_coeff).lo
            if rest == NEG_INF:
                continue
            limit = -int(rest)
            index = self._index[name]
            if coefficient > 0:
                bound = Interval(NEG_INF, _floor_div(limit, coefficient))
            else:
                bound = Interval(_ceil_div(limit, coefficient), POS_INF)
            narrowed = bounds[index].meet(bound)
            if narrowed is None:
                return False
            bounds[index] = narrowed
        return True

    def meet_atom(self, a: IntervalBox, atom: Atom) -> IntervalBox:
        self.check(a)
        if a.bounds is None:
            return a
        bounds = list(a.bounds)
        for form in upper_forms(atom.difference(), atom.op):
            if not self._propagate(bounds, form):
                return self._bottom
        return IntervalBox(self._variables, tuple(bounds))

    def atom_certain(self, a: IntervalBox, atom: Atom) -> bool:
        self.check(a)
        if a.bounds is None:
            return True
        return all(
            self.interval_of(a.bounds, form).hi <= 0
            for form in upper_forms(atom.difference(), atom.op)
        )

    def render(self, a: IntervalBox) -> str:
        self.check(a)
        if a.bounds is None:
            return "bottom"
        return " ".join(f"{name}:{iv.render()}" for name, iv in zip(self._variables, a.bounds))
