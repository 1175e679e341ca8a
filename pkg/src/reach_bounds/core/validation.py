"""Structural checks every program must pass before analysis."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Set

from reach_bounds.core.errors import ParseErrorKind, ProgramError
from reach_bounds.core.evaluation import eval_guard
from reach_bounds.core.models import Guard, Program


def _require_declared(names: Iterable[str], declared: Set[str], where: str) -> None:
    for name in sorted(names):
        if name not in declared:
            raise ProgramError(
                ParseErrorKind.UNDECLARED_VARIABLE,
                f"Undeclared variable '{name}' in {where}",
                subject=name,
            )


def _check_guard(guard: Guard, declared: Set[str], where: str) -> None:
    _require_declared(guard.variables, declared, where)


def validate_program(program: Program) -> Program:
    """Raise :class:`ProgramError` for the first violated invariant, else return ``program``."""
    declared: Set[str] = set()
    for decl in program.decls:
        if decl.name in declared:
            raise ProgramError(
                ParseErrorKind.DUPLICATE_NAME,
                f"Variable '{decl.name}' is declared twice",
                subject=decl.name,
            )
        declared.add(decl.name)
        if decl.range is not None:
            lo, hi = decl.range
            if lo > hi or not lo <= decl.init <= hi:
                raise ProgramError(
                    ParseErrorKind.INIT_OUT_OF_RANGE,
                    f"Initial value {decl.init} of '{decl.name}' is outside [{lo},{hi}]",
                    subject=decl.name,
                )

    if not program.commands:
        raise ProgramError(ParseErrorKind.SYNTAX, "A program needs at least one command")

    seen_commands: Set[str] = set()
    for command in program.commands:
        if command.name in seen_commands:
            raise ProgramError(
                ParseErrorKind.DUPLICATE_NAME,
                f"Command '{command.name}' is defined twice",
                subject=command.name,
            )
        seen_commands.add(command.name)
        _check_guard(command.guard, declared, f"the guard of {command.name}")
        if not command.updates:
            raise ProgramError(
                ParseErrorKind.SYNTAX,
                f"Command '{command.name}' has no updates",
                subject=command.name,
            )
        for update in command.updates:
            if not Fraction(0) < update.probability <= 1:
                raise ProgramError(
                    ParseErrorKind.BAD_PROBABILITY_SUM,
                    f"Probability {update.probability} of '{command.name}' is not in (0,1]",
                    subject=command.name,
                )
            targets = [name for name, _ in update.assignment.targets]
            if len(targets) != len(set(targets)):
                raise ProgramError(
                    ParseErrorKind.DUPLICATE_NAME,
                    f"An update of '{command.name}' assigns the same variable twice",
                    subject=command.name,
                )
            _require_declared(update.assignment.variables, declared, f"an update of {command.name}")
        if command.total_probability != 1:
            raise ProgramError(
                ParseErrorKind.BAD_PROBABILITY_SUM,
                f"Probabilities of '{command.name}' sum to {command.total_probability}, not 1",
                subject=command.name,
            )

    _check_guard(program.reach, declared, "the reach condition")
    if eval_guard(program.reach, program.init):
        raise ProgramError(
            ParseErrorKind.INIT_SATISFIES_REACH,
            "The initial configuration already satisfies the reach condition",
        )
    return program
