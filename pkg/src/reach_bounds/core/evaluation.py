"""Concrete semantics of expressions, guards and assignments."""
from __future__ import annotations

from typing import Dict

from reach_bounds.core.errors import ArithmeticOverflowError, RangeViolationError
from reach_bounds.core.models import (
    INT64_MAX,
    INT64_MIN,
    Assignment,
    Atom,
    Configuration,
    Guard,
    LinExpr,
    Program,
)


def checked(value: int, context: str = "expression") -> int:
    """Return ``value`` unchanged or raise when it does not fit a signed 64-bit integer."""
    if value < INT64_MIN or value > INT64_MAX:
        raise ArithmeticOverflowError(f"64-bit overflow while evaluating {context}: {value}")
    return value


def eval_expr(expr: LinExpr, config: Configuration) -> int:
    """Evaluate ``expr`` at ``config`` with overflow checks on every intermediate result."""
    total = checked(expr.constant)
    for name, coefficient in expr.terms:
        term = checked(coefficient * config[name], expr.render())
        total = checked(total + term, expr.render())
    return total


def eval_atom(atom: Atom, config: Configuration) -> bool:
    return atom.op.holds(eval_expr(atom.difference(), config))


def eval_guard(guard: Guard, config: Configuration) -> bool:
    """True iff every atom holds; the empty guard always holds."""
    return all(eval_atom(atom, config) for atom in guard.atoms)


def apply_assignment(
    assignment: Assignment,
    config: Configuration,
    program: Program | None = None,
    *,
    check_ranges: bool = True,
) -> Configuration:
    """Apply a parallel assignment; right-hand sides all read the pre-state.

    When ``program`` is given and ``check_ranges`` is set, targets leaving their declared
    range raise :class:`RangeViolationError`.
    """
    updates: Dict[str, int] = {
        name: eval_expr(expr, config) for name, expr in assignment.targets
    }
    if program is not None and check_ranges:
        ranges = program.ranges
        for name, value in updates.items():
            bounds = ranges.get(name)
            if bounds is not None and not bounds[0] <= value <= bounds[1]:
                raise RangeViolationError(name, value, bounds)
    return config.replace(updates)
