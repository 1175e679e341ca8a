from __future__ import annotations

from fractions import Fraction

import pytest

from reach_bounds.core.errors import (
    ArithmeticOverflowError,
    ParseErrorKind,
    ProgramError,
    RangeViolationError,
)
from reach_bounds.core.evaluation import apply_assignment, eval_expr, eval_guard
from reach_bounds.core.models import (
    INT64_MAX,
    Assignment,
    Atom,
    Comparison,
    Configuration,
    Guard,
    GuardedCommand,
    LinExpr,
    Program,
    Update,
    VarDecl,
)
from reach_bounds.core.validation import validate_program

x = LinExpr.variable("x")
y = LinExpr.variable("y")


def _program(**overrides) -> Program:
    values = {
        "decls": (VarDecl("x", 0, (0, 5)), VarDecl("y", 1)),
        "commands": (
            GuardedCommand(
                "A",
                Guard((Atom(x, Comparison.LT, LinExpr(5)),)),
                (
                    Update(Fraction(1, 2), Assignment.of({"x": x + LinExpr(1)})),
                    Update(Fraction(1, 2), Assignment.of({"y": y - x})),
                ),
            ),
        ),
        "reach": Guard((Atom(x, Comparison.EQ, LinExpr(5)),)),
    }
    values.update(overrides)
    return Program(**values)


def test_linear_expressions_normalise_terms() -> None:
    expr = LinExpr(2, (("y", 1), ("x", 3), ("y", -1)))
    assert expr == LinExpr.of(2, {"x": 3})
    assert expr.render() == "3*x + 2"
    assert (x - y + LinExpr(2)).render() == "x - y + 2"
    assert (-x).render() == "-x"
    assert LinExpr(-4).render() == "-4"


def test_parallel_assignment_reads_the_pre_state() -> None:
    swap = Assignment.of({"x": y, "y": x})
    config = Configuration(("x", "y"), (1, 2))
    assert apply_assignment(swap, config) == Configuration(("x", "y"), (2, 1))


def test_assignment_outside_declared_range_is_reported() -> None:
    program = _program()
    config = Configuration(("x", "y"), (5, 0))
    with pytest.raises(RangeViolationError) as info:
        apply_assignment(Assignment.of({"x": x + LinExpr(1)}), config, program)
    assert info.value.variable == "x"
    assert info.value.value == 6
    unchecked = apply_assignment(
        Assignment.of({"x": x + LinExpr(1)}), config, program, check_ranges=False
    )
    assert unchecked["x"] == 6


def test_overflow_is_detected_on_intermediate_results() -> None:
    config = Configuration(("x",), (INT64_MAX,))
    with pytest.raises(ArithmeticOverflowError):
        eval_expr(LinExpr.of(-1, {"x": 2}), config)


def test_guards_are_conjunctions_and_empty_guard_holds() -> None:
    config = Configuration(("x", "y"), (3, 4))
    guard = Guard((Atom(x, Comparison.LT, y), Atom(y, Comparison.LE, LinExpr(4))))
    assert eval_guard(guard, config)
    assert not eval_guard(Guard((Atom(x, Comparison.GT, y),)), config)
    assert eval_guard(Guard(), config)


def test_comparison_complements_cover_the_integers() -> None:
    for op in Comparison:
        for difference in range(-2, 3):
            negated = any(other.holds(difference) for other in op.complement())
            assert negated != op.holds(difference)


def test_valid_program_passes_validation() -> None:
    program = _program()
    assert validate_program(program) is program
    assert program.init == Configuration(("x", "y"), (0, 1))
    assert program.ranges == {"x": (0, 5)}


@pytest.mark.parametrize(
    "overrides, kind",
    [
        ({"decls": (VarDecl("x", 0), VarDecl("x", 1))}, ParseErrorKind.DUPLICATE_NAME),
        ({"decls": (VarDecl("x", 7, (0, 5)), VarDecl("y", 1))}, ParseErrorKind.INIT_OUT_OF_RANGE),
        ({"reach": Guard((Atom(x, Comparison.EQ, LinExpr(0)),))}, ParseErrorKind.INIT_SATISFIES_REACH),
        ({"reach": Guard((Atom(LinExpr.variable("z"), Comparison.EQ, LinExpr(0)),))}, ParseErrorKind.UNDECLARED_VARIABLE),
        (
            {
                "commands": (
                    GuardedCommand("A", Guard(), (Update(Fraction(1, 3), Assignment()),)),
                )
            },
            ParseErrorKind.BAD_PROBABILITY_SUM,
        ),
    ],
)
def test_invalid_programs_are_rejected(overrides, kind) -> None:
    with pytest.raises(ProgramError) as info:
        validate_program(_program(**overrides))
    assert info.value.kind is kind
