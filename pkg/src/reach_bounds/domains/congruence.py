"""Non-relational integer congruences ``x = r (mod m)``."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence, Tuple

from reach_bounds.core.models import Assignment, Atom, Comparison, Configuration, LinExpr
from reach_bounds.domains.base import AbstractDomain, AbstractElement


@dataclass(frozen=True, slots=True)
class Congruence:
    """The set ``{r + k*m}``; ``m == 0`` is the constant ``r`` and ``m == 1`` all integers."""

    modulus: int
    residue: int

    @classmethod
    def make(cls, modulus: int, residue: int) -> "Congruence":
        modulus = abs(modulus)
        return cls(0, residue) if modulus == 0 else cls(modulus, residue % modulus)

    @classmethod
    def constant(cls, value: int) -> "Congruence":
        return cls(0, value)

    @property
    def is_constant(self) -> bool:
        return self.modulus == 0

    def contains(self, value: int) -> bool:
        if self.modulus == 0:
            return value == self.residue
        return (value - self.residue) % self.modulus == 0

    def leq(self, other: "Congruence") -> bool:
        if other.modulus == 0:
            return self.modulus == 0 and self.residue == other.residue
        return self.modulus % other.modulus == 0 and other.contains(self.residue)

    def join(self, other: "Congruence") -> "Congruence":
        modulus = gcd(gcd(self.modulus, other.modulus), abs(self.residue - other.residue))
        return Congruence.make(modulus, self.residue)

    def meet(self, other: "Congruence") -> Optional["Congruence"]:
        if self.modulus == 0:
            return self if other.contains(self.residue) else None
        if other.modulus == 0:
            return other if self.contains(other.residue) else None
        common = gcd(self.modulus, other.modulus)
        if (other.residue - self.residue) % common:
            return None
        # Chinese remaindering: residue + modulus * t with t solving the reduced congruence.
        step = other.modulus // common
        inverse = pow(self.modulus // common, -1, step) if step > 1 else 0
        t = ((other.residue - self.residue) // common * inverse) % step if step > 1 else 0
        lcm = self.modulus * step
        return Congruence.make(lcm, self.residue + self.modulus * t)

    def add(self, other: "Congruence") -> "Congruence":
        return Congruence.make(gcd(self.modulus, other.modulus), self.residue + other.residue)

    def scale(self, factor: int) -> "Congruence":
        if factor == 0:
            return Congruence.constant(0)
        return Congruence.make(self.modulus * factor, self.residue * factor)

    def render(self) -> str:
        return f"({self.modulus},{self.residue})"


ANY_INTEGER = Congruence(1, 0)


@dataclass(frozen=True, slots=True)
class CongruenceMap(AbstractElement):
    """One congruence per variable; ``classes is None`` encodes bottom."""

    variables: Tuple[str, ...]
    classes: Optional[Tuple[Congruence, ...]]

    @property
    def is_bottom(self) -> bool:
        return self.classes is None


class CongruenceDomain(AbstractDomain):
    """Congruence analysis; widening is join since ascending chains follow divisor chains."""

    name = "congruence"
    element_type = CongruenceMap

    def __init__(self, variables: Sequence[str]) -> None:
        super().__init__(variables)
        self._bottom = CongruenceMap(self._variables, None)
        self._top = CongruenceMap(self._variables, tuple(ANY_INTEGER for _ in self._variables))

    def grid(self, **classes: Tuple[int, int]) -> CongruenceMap:
        """Build an element from ``name=(modulus, residue)`` pairs; others are unconstrained."""
        return CongruenceMap(
            self._variables,
            tuple(
                Congruence.make(*classes[name]) if name in classes else ANY_INTEGER
                for name in self._variables
            ),
        )

    def bottom(self) -> CongruenceMap:
        return self._bottom

    def top(self) -> CongruenceMap:
        return self._top

    def leq(self, a: CongruenceMap, b: CongruenceMap) -> bool:
        self.check(a, b)
        if a.classes is None:
            return True
        if b.classes is None:
            return False
        return all(x.leq(y) for x, y in zip(a.classes, b.classes))

    def join(self, a: CongruenceMap, b: CongruenceMap) -> CongruenceMap:
        self.check(a, b)
        if a.classes is None:
            return b
        if b.classes is None:
            return a
        return CongruenceMap(self._variables, tuple(x.join(y) for x, y in zip(a.classes, b.classes)))

    def meet(self, a: CongruenceMap, b: CongruenceMap) -> CongruenceMap:
        self.check(a, b)
        if a.classes is None or b.classes is None:
            return self._bottom
        met = []
        for x, y in zip(a.classes, b.classes):
            both = x.meet(y)
            if both is None:
                return self._bottom
            met.append(both)
        return CongruenceMap(self._variables, tuple(met))

    def widen(self, a: CongruenceMap, b: CongruenceMap) -> CongruenceMap:
        return self.join(a, b)

    def abstract_singleton(self, config: Configuration) -> CongruenceMap:
        return CongruenceMap(
            self._variables, tuple(Congruence.constant(config[name]) for name in self._variables)
        )

    def concrete_member(self, a: CongruenceMap, config: Configuration) -> bool:
        self.check(a)
        if a.classes is None:
            return False
        return all(c.contains(config[name]) for name, c in zip(self._variables, a.classes))

    def pinned_value(self, a: CongruenceMap, variable: str) -> Optional[int]:
        self.check(a)
        if a.classes is None:
            return None
        cls = a.classes[self._index[variable]]
        return cls.residue if cls.is_constant else None

    def class_of(self, classes: Sequence[Congruence], expr: LinExpr) -> Congruence:
        """Congruence of ``expr`` over a map, closed under addition and scaling."""
        result = Congruence.constant(expr.constant)
        for name, coefficient in expr.terms:
            result = result.add(classes[self._index[name]].scale(coefficient))
        return result

    def assign_transform(self, a: CongruenceMap, assignment: Assignment) -> CongruenceMap:
        self.check(a)
        if a.classes is None or not assignment.targets:
            return a
        updated = list(a.classes)
        for name, expr in assignment.targets:
            updated[self._index[name]] = self.class_of(a.classes, expr)
        return CongruenceMap(self._variables, tuple(updated))

    def meet_atom(self, a: CongruenceMap, atom: Atom) -> CongruenceMap:
        self.check(a)
        if a.classes is None:
            return a
        difference = atom.difference()
        value = self.class_of(a.classes, difference)
        if value.is_constant:
            return a if atom.op.holds(value.residue) else self._bottom
        if atom.op is not Comparison.EQ:
            return a
        if not value.contains(0):
            return self._bottom
        if len(difference.terms) != 1:
            return a
        name, coefficient = difference.terms[0]
        # coefficient * x + constant = 0 has the integral solution below since 0 is in the class.
        solution = -difference.constant // coefficient
        index = self._index[name]
        pinned = a.classes[index].meet(Congruence.constant(solution))
        if pinned is None:
            return self._bottom
        updated = list(a.classes)
        updated[index] = pinned
        return CongruenceMap(self._variables, tuple(updated))

    def atom_certain(self, a: CongruenceMap, atom: Atom) -> bool:
        self.check(a)
        if a.classes is None:
            return True
        value = self.class_of(a.classes, atom.difference())
        return value.is_constant and atom.op.holds(value.residue)

    def render(self, a: CongruenceMap) -> str:
        self.check(a)
        if a.classes is None:
            return "bottom"
        return " ".join(f"{name}:{c.render()}" for name, c in zip(self._variables, a.classes))
