"""Immutable program representation shared by the oracle and the abstract domains."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Tuple

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

# Name of the implicit self-loop that closes stuck non-final states.
IDLE_COMMAND = "<idle>"


class Comparison(str, Enum):
    """Relational operators allowed in guard atoms."""

    LT = "<"
    LE = "<="
    EQ = "="
    GE = ">="
    GT = ">"

    def holds(self, difference: int) -> bool:
        """Decide ``lhs op rhs`` given ``lhs - rhs``."""
        if self is Comparison.LT:
            return difference < 0
        if self is Comparison.LE:
            return difference <= 0
        if self is Comparison.EQ:
            return difference == 0
        if self is Comparison.GE:
            return difference >= 0
        return difference > 0

    def complement(self) -> Tuple["Comparison", ...]:
        """Operators whose union is the negation of this one."""
        return {
            Comparison.LT: (Comparison.GE,),
            Comparison.LE: (Comparison.GT,),
            Comparison.EQ: (Comparison.LT, Comparison.GT),
            Comparison.GE: (Comparison.LT,),
            Comparison.GT: (Comparison.LE,),
        }[self]


@dataclass(frozen=True, slots=True)
class LinExpr:
    """Integer linear expression ``constant + sum(coefficient * variable)``.

    Terms are merged, stripped of zero coefficients and sorted by variable name, so two
    expressions denoting the same polynomial compare equal.
    """

    constant: int = 0
    terms: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        merged: Dict[str, int] = {}
        for name, coefficient in self.terms:
            merged[name] = merged.get(name, 0) + coefficient
        normalized = tuple(sorted((name, coeff) for name, coeff in merged.items() if coeff))
        object.__setattr__(self, "terms", normalized)

    @classmethod
    def of(cls, constant: int = 0, coefficients: Optional[Mapping[str, int]] = None) -> "LinExpr":
        return cls(constant, tuple((coefficients or {}).items()))

    @classmethod
    def variable(cls, name: str) -> "LinExpr":
        return cls(0, ((name, 1),))

    @property
    def coefficients(self) -> Dict[str, int]:
        return dict(self.terms)

    @property
    def variables(self) -> FrozenSet[str]:
        return frozenset(name for name, _ in self.terms)

    @property
    def is_constant(self) -> bool:
        return not self.terms

    def coefficient(self, name: str) -> int:
        for var, coeff in self.terms:
            if var == name:
                return coeff
        return 0

    def scale(self, factor: int) -> "LinExpr":
        return LinExpr(self.constant * factor, tuple((n, c * factor) for n, c in self.terms))

    def __add__(self, other: "LinExpr") -> "LinExpr":
        return LinExpr(self.constant + other.constant, self.terms + other.terms)

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        return self + other.scale(-1)

    def __neg__(self) -> "LinExpr":
        return self.scale(-1)

    def shift(self, amount: int) -> "LinExpr":
        return LinExpr(self.constant + amount, self.terms)

    def render(self) -> str:
        pieces = []
        for index, (name, coeff) in enumerate(self.terms):
            magnitude = abs(coeff)
            term = name if magnitude == 1 else f"{magnitude}*{name}"
            if index == 0:
                pieces.append(f"-{term}" if coeff < 0 else term)
            else:
                pieces.append(f" - {term}" if coeff < 0 else f" + {term}")
        if not pieces:
            return str(self.constant)
        if self.constant > 0:
            pieces.append(f" + {self.constant}")
        elif self.constant < 0:
            pieces.append(f" - {-self.constant}")
        return "".join(pieces)


@dataclass(frozen=True, slots=True)
class Atom:
    """A single comparison ``lhs op rhs``."""

    lhs: LinExpr
    op: Comparison
    rhs: LinExpr = field(default_factory=LinExpr)

    def difference(self) -> LinExpr:
        return self.lhs - self.rhs

    @property
    def variables(self) -> FrozenSet[str]:
        return self.difference().variables

    @property
    def is_single_variable(self) -> bool:
        return len(self.variables) <= 1

    def complement(self) -> Tuple["Atom", ...]:
        """Atoms whose disjunction is the negation of this atom."""
        return tuple(Atom(self.lhs, op, self.rhs) for op in self.op.complement())

    def render(self) -> str:
        return f"{self.lhs.render()} {self.op.value} {self.rhs.render()}"


@dataclass(frozen=True, slots=True)
class Guard:
    """Conjunction of atoms; the empty conjunction is ``true``."""

    atoms: Tuple[Atom, ...] = ()

    @property
    def variables(self) -> FrozenSet[str]:
        names: FrozenSet[str] = frozenset()
        for atom in self.atoms:
            names |= atom.variables
        return names

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def render(self) -> str:
        if not self.atoms:
            return "true"
        return " & ".join(f"({atom.render()})" for atom in self.atoms)


TRUE = Guard()


@dataclass(frozen=True, slots=True)
class Assignment:
    """Parallel update; variables that are not targeted keep their value."""

    targets: Tuple[Tuple[str, LinExpr], ...] = ()

    @classmethod
    def of(cls, targets: Mapping[str, LinExpr]) -> "Assignment":
        return cls(tuple(targets.items()))

    def as_dict(self) -> Dict[str, LinExpr]:
        return dict(self.targets)

    @property
    def variables(self) -> FrozenSet[str]:
        names = {name for name, _ in self.targets}
        for _, expr in self.targets:
            names |= expr.variables
        return frozenset(names)

    def render(self) -> str:
        if not self.targets:
            return "true"
        return " & ".join(f"{name}' = {expr.render()}" for name, expr in self.targets)


IDENTITY = Assignment()


@dataclass(frozen=True, slots=True)
class Update:
    """One probabilistic outcome of a guarded command."""

    probability: Fraction
    assignment: Assignment = IDENTITY


@dataclass(frozen=True, slots=True)
class GuardedCommand:
    """Named guard paired with a distribution over assignments."""

    name: str
    guard: Guard
    updates: Tuple[Update, ...]

    @property
    def total_probability(self) -> Fraction:
        return sum((update.probability for update in self.updates), Fraction(0))


@dataclass(frozen=True, slots=True)
class VarDecl:
    """Integer variable with an initial value and an optional inclusive range."""

    name: str
    init: int
    range: Optional[Tuple[int, int]] = None


@lru_cache(maxsize=256)
def _positions(names: Tuple[str, ...]) -> Dict[str, int]:
    return {name: index for index, name in enumerate(names)}


@dataclass(frozen=True, slots=True)
class Configuration:
    """Total valuation of the declared variables, ordered by declaration."""

    names: Tuple[str, ...]
    values: Tuple[int, ...]

    @classmethod
    def from_mapping(cls, names: Iterable[str], mapping: Mapping[str, int]) -> "Configuration":
        names = tuple(names)
        return cls(names, tuple(mapping[name] for name in names))

    def __getitem__(self, name: str) -> int:
        return self.values[_positions(self.names)[name]]

    def get(self, name: str, default: Optional[int] = None) -> Optional[int]:
        index = _positions(self.names).get(name)
        return default if index is None else self.values[index]

    def replace(self, updates: Mapping[str, int]) -> "Configuration":
        if not updates:
            return self
        values = list(self.values)
        positions = _positions(self.names)
        for name, value in updates.items():
            values[positions[name]] = value
        return Configuration(self.names, tuple(values))

    def as_dict(self) -> Dict[str, int]:
        return dict(zip(self.names, self.values))

    def render(self) -> str:
        return "{" + ", ".join(f"{n}:{v}" for n, v in zip(self.names, self.values)) + "}"


@dataclass(frozen=True, slots=True)
class Program:
    """Declarations, guarded commands and the reach condition of one program."""

    decls: Tuple[VarDecl, ...]
    commands: Tuple[GuardedCommand, ...]
    reach: Guard

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(decl.name for decl in self.decls)

    @property
    def init(self) -> Configuration:
        return Configuration(self.variables, tuple(decl.init for decl in self.decls))

    @property
    def ranges(self) -> Dict[str, Tuple[int, int]]:
        return {decl.name: decl.range for decl in self.decls if decl.range is not None}

    def command(self, name: str) -> GuardedCommand:
        for command in self.commands:
            if command.name == name:
                return command
        raise KeyError(name)
