"""Contract every numeric abstract domain implements."""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Dict, List, Optional, Sequence, Tuple, Type

from reach_bounds.core.errors import DomainMismatchError
from reach_bounds.core.models import Assignment, Atom, Comparison, Configuration, Guard, LinExpr


class GuardStatus(str, Enum):
    """Conservative answer to "how much of γ(a) satisfies the guard"."""

    EMPTY_CERTAIN = "empty-certain"
    FULL_CERTAIN = "full-certain"
    MIXED = "mixed"


@dataclass(frozen=True, slots=True)
class FinalOverlap:
    """Whether γ(a) meets the reach set, and whether it lies inside it."""

    intersects: bool
    contained: bool


class AbstractElement(ABC):
    """Immutable domain value over an ordered tuple of variables."""

    __slots__ = ()

    variables: Tuple[str, ...]

    @property
    @abstractmethod
    def is_bottom(self) -> bool:
        """True for the least element."""


def upper_forms(difference: LinExpr, op: Comparison) -> Tuple[LinExpr, ...]:
    """Rewrite ``difference op 0`` over the integers as a conjunction of ``form <= 0``."""
    if op is Comparison.LE:
        return (difference,)
    if op is Comparison.LT:
        return (difference.shift(1),)
    if op is Comparison.GE:
        return (-difference,)
    if op is Comparison.GT:
        return ((-difference).shift(1),)
    return (difference, -difference)


class AbstractDomain(ABC):
    """Lattice operations, widening and transformers over one variable tuple.

    Elements are plain values; the domain object only carries the variable order and
    the algorithms. Every binary operation rejects elements of another domain or another
    variable tuple with :class:`DomainMismatchError`.
    """

    name: ClassVar[str]
    element_type: ClassVar[Type[AbstractElement]]

    def __init__(self, variables: Sequence[str]) -> None:
        self._variables: Tuple[str, ...] = tuple(variables)
        self._index: Dict[str, int] = {name: i for i, name in enumerate(self._variables)}

    @property
    def variables(self) -> Tuple[str, ...]:
        return self._variables

    def check(self, *elements: AbstractElement) -> None:
        for element in elements:
            if not isinstance(element, self.element_type):
                raise DomainMismatchError(
                    f"{self.name} domain cannot operate on {type(element).__name__}"
                )
            if element.variables != self._variables:
                raise DomainMismatchError(
                    f"Variable sets differ: {element.variables} vs {self._variables}"
                )

    # -- lattice -------------------------------------------------------------------
    @abstractmethod
    def bottom(self) -> AbstractElement: ...

    @abstractmethod
    def top(self) -> AbstractElement: ...

    def is_bottom(self, a: AbstractElement) -> bool:
        self.check(a)
        return a.is_bottom

    @abstractmethod
    def leq(self, a: AbstractElement, b: AbstractElement) -> bool: ...

    @abstractmethod
    def join(self, a: AbstractElement, b: AbstractElement) -> AbstractElement: ...

    @abstractmethod
    def meet(self, a: AbstractElement, b: AbstractElement) -> AbstractElement: ...

    @abstractmethod
    def widen(self, a: AbstractElement, b: AbstractElement) -> AbstractElement: ...

    def equal(self, a: AbstractElement, b: AbstractElement) -> bool:
        self.check(a, b)
        return a == b

    # -- abstraction / concretization ----------------------------------------------
    @abstractmethod
    def abstract_singleton(self, config: Configuration) -> AbstractElement: ...

    @abstractmethod
    def concrete_member(self, a: AbstractElement, config: Configuration) -> bool: ...

    @abstractmethod
    def pinned_value(self, a: AbstractElement, variable: str) -> Optional[int]:
        """The single value γ(a) allows for ``variable``, if the element proves one."""

    # -- transformers ----------------------------------------------------------------
    @abstractmethod
    def assign_transform(self, a: AbstractElement, assignment: Assignment) -> AbstractElement: ...

    @abstractmethod
    def meet_atom(self, a: AbstractElement, atom: Atom) -> AbstractElement:
        """Over-approximate the members of γ(a) satisfying ``atom``."""

    @abstractmethod
    def atom_certain(self, a: AbstractElement, atom: Atom) -> bool:
        """True only if every member of γ(a) satisfies ``atom``."""

    def meet_guard(self, a: AbstractElement, guard: Guard) -> AbstractElement:
        result = a
        for atom in guard.atoms:
            if result.is_bottom:
                break
            result = self.meet_atom(result, atom)
        return result

    def guard_split(self, a: AbstractElement, guard: Guard) -> Tuple[AbstractElement, ...]:
        """Finite cover of the members of γ(a) satisfying ``guard``.

        Subclasses may return several elements to split on the guard more precisely.
        """
        refined = self.meet_guard(a, guard)
        return () if refined.is_bottom else (refined,)

    def guard_status(self, a: AbstractElement, guard: Guard) -> GuardStatus:
        self.check(a)
        if self.meet_guard(a, guard).is_bottom:
            return GuardStatus.EMPTY_CERTAIN
        if all(self.atom_certain(a, atom) for atom in guard.atoms):
            return GuardStatus.FULL_CERTAIN
        return GuardStatus.MIXED

    def complement_split(self, a: AbstractElement, guard: Guard) -> Tuple[AbstractElement, ...]:
        """Cover of the members of γ(a) violating ``guard`` (empty tuple when none can)."""
        self.check(a)
        pieces: List[AbstractElement] = []
        prefix = a
        for atom in guard.atoms:
            if prefix.is_bottom:
                break
            for negated in atom.complement():
                piece = self.meet_atom(prefix, negated)
                if not piece.is_bottom:
                    pieces.append(piece)
            prefix = self.meet_atom(prefix, atom)
        return tuple(pieces)

    def final_overlap(self, a: AbstractElement, reach: Guard) -> FinalOverlap:
        """Exact when every reach atom mentions at most one variable."""
        intersects = not self.meet_guard(a, reach).is_bottom
        contained = intersects and all(self.atom_certain(a, atom) for atom in reach.atoms)
        return FinalOverlap(intersects=intersects, contained=contained)

    # -- presentation ----------------------------------------------------------------
    @abstractmethod
    def render(self, a: AbstractElement) -> str: ...
