"""Exception hierarchy shared by every reach-bounds service."""
from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING, Any, Optional, Sequence, Tuple

if TYPE_CHECKING:  # pragma: no cover - typing only
    from reach_bounds.services.refiner import RefinementReport


class ParseErrorKind(str, Enum):
    """Categories of rejected program texts."""

    SYNTAX = "syntax"
    DUPLICATE_NAME = "duplicate-name"
    BAD_PROBABILITY_SUM = "bad-probability-sum"
    INIT_OUT_OF_RANGE = "init-out-of-range"
    INIT_SATISFIES_REACH = "init-satisfies-reach"
    UNDECLARED_VARIABLE = "undeclared-variable"


class ReachBoundsError(Exception):
    """Base class for all analysis failures."""


class ArithmeticOverflowError(ReachBoundsError):
    """Raised when concrete evaluation leaves the signed 64-bit range."""


class RangeViolationError(ReachBoundsError):
    """Raised when an assignment drives a variable outside its declared range."""

    def __init__(self, variable: str, value: int, bounds: Tuple[int, int]) -> None:
        super().__init__(
            f"Variable '{variable}' takes value {value} outside its range [{bounds[0]},{bounds[1]}]"
        )
        self.variable = variable
        self.value = value
        self.bounds = bounds


class ProgramError(ReachBoundsError):
    """A structurally invalid program; ``subject`` names the offending declaration."""

    def __init__(self, kind: ParseErrorKind, message: str, subject: Optional[str] = None) -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.subject = subject


class ParseError(ReachBoundsError):
    """Rejected program text with a 1-based source position."""

    def __init__(self, line: int, column: int, message: str, kind: ParseErrorKind) -> None:
        super().__init__(f"{line}:{column}: {kind.value}: {message}")
        self.line = line
        self.column = column
        self.message = message
        self.kind = kind


class DomainMismatchError(ReachBoundsError, TypeError):
    """Raised when elements of different domains or variable sets are combined."""


class OracleInfeasibleError(ReachBoundsError):
    """The explicit state space is too large for exact enumeration."""


class ConvergenceError(ReachBoundsError):
    """Value iteration hit its iteration cap before reaching the tolerance."""

    def __init__(self, iterations: int, residual: float, last_iterate: Sequence[float]) -> None:
        super().__init__(
            f"Value iteration did not converge after {iterations} sweeps (residual {residual:.3e})"
        )
        self.iterations = iterations
        self.residual = residual
        self.last_iterate = tuple(last_iterate)


class NodeBudgetExceededError(ReachBoundsError):
    """Game construction created more Player-1 nodes than allowed."""

    def __init__(self, budget: int) -> None:
        super().__init__(f"Game construction exceeded the node budget of {budget} Player-1 nodes")
        self.budget = budget
        self.partial_report: Optional[RefinementReport] = None


class StrategyError(ReachBoundsError):
    """A strategy is undefined or illegal on a node that matters."""


class AnalysisConfigError(ReachBoundsError):
    """Invalid analysis options (unknown names, relational reach atoms, bad numbers)."""

    def __init__(self, message: str, *, details: Any = None) -> None:
        super().__init__(message)
        self.details = details
