"""Parse and pretty-print guarded-command programs."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from reach_bounds.core.errors import ParseError, ParseErrorKind, ProgramError
from reach_bounds.core.models import (
    Assignment,
    Atom,
    Comparison,
    Guard,
    GuardedCommand,
    LinExpr,
    Program,
    Update,
    VarDecl,
)
from reach_bounds.core.validation import validate_program

LOGGER = logging.getLogger(__name__)

GRAMMAR = r"""
    start: decl* command+ reach

    decl: "int" var_init ("," var_init)* ";"
    var_init: NAME range? "=" SIGNED_INT
    range: "in" "[" SIGNED_INT "," SIGNED_INT "]"

    command: NAME ":" guard "->" update ("+" update)* ";"
    update: PROB ":" assign_group ("&" assign_group)*
    assign_group: "(" assign ("&" assign)* ")"
                | "(" "true" ")"
    assign: NAME "'" "=" sum

    reach: REACH ":" guard ";"?

    guard: "true"                 -> true_guard
         | atom ("&" atom)*
    ?atom: "(" comparison ")"
         | comparison
    comparison: sum COMPARATOR sum

    ?sum: product
        | sum "+" product         -> add
        | sum "-" product         -> sub
    ?product: factor
        | product "*" factor      -> mul
    ?factor: INT                  -> number
        | NAME                    -> variable
        | "-" factor              -> neg
        | "(" sum ")"

    REACH: "reach"
    COMPARATOR: "<=" | ">=" | "<" | ">" | "="
    PROB: /\d+(\.\d+)?(\/\d+)?/
    NAME: /[A-Za-z_][A-Za-z0-9_]*/
    COMMENT: /\/\/[^\n]*/

    %import common.INT
    %import common.SIGNED_INT
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_PARSER = Lark(GRAMMAR, parser="earley", propagate_positions=True)

Position = Tuple[int, int]


@dataclass(slots=True)
class _Reach:
    guard: Guard
    position: Position


class _ProgramBuilder(Transformer):
    """Turn the parse tree into IR values while remembering source positions."""

    def __init__(self) -> None:
        super().__init__()
        self.declared_at: Dict[str, List[Position]] = {}
        self.commands_at: Dict[str, List[Position]] = {}
        self.first_use: Dict[str, Position] = {}
        self.reach_at: Position = (1, 1)

    # expressions
    def number(self, children: List[Token]) -> LinExpr:
        return LinExpr(int(children[0]))

    def variable(self, children: List[Token]) -> LinExpr:
        token = children[0]
        self.first_use.setdefault(str(token), (token.line, token.column))
        return LinExpr.variable(str(token))

    def neg(self, children: List[LinExpr]) -> LinExpr:
        return -children[0]

    def add(self, children: List[LinExpr]) -> LinExpr:
        return children[0] + children[1]

    def sub(self, children: List[LinExpr]) -> LinExpr:
        return children[0] - children[1]

    @v_args(meta=True)
    def mul(self, meta, children: List[LinExpr]) -> LinExpr:
        left, right = children
        if left.is_constant:
            return right.scale(left.constant)
        if right.is_constant:
            return left.scale(right.constant)
        raise ParseError(
            meta.line,
            meta.column,
            f"non-linear product {left.render()} * {right.render()}",
            ParseErrorKind.SYNTAX,
        )

    # guards
    def comparison(self, children: list) -> Atom:
        lhs, op, rhs = children
        return Atom(lhs, Comparison(str(op)), rhs)

    def true_guard(self, children: list) -> Guard:
        return Guard()

    def guard(self, children: List[Atom]) -> Guard:
        return Guard(tuple(children))

    # updates
    def assign(self, children: list) -> Tuple[str, LinExpr]:
        token, expr = children
        self.first_use.setdefault(str(token), (token.line, token.column))
        return str(token), expr

    def assign_group(self, children: list) -> List[Tuple[str, LinExpr]]:
        return list(children)

    def update(self, children: list) -> Update:
        probability = self._probability(children[0])
        targets: List[Tuple[str, LinExpr]] = []
        for group in children[1:]:
            targets.extend(group)
        return Update(probability, Assignment(tuple(targets)))

    @staticmethod
    def _probability(token: Token) -> Fraction:
        text = str(token)
        try:
            return Fraction(text)
        except ZeroDivisionError as err:
            raise ParseError(
                token.line,
                token.column,
                f"probability {text} has a zero denominator",
                ParseErrorKind.BAD_PROBABILITY_SUM,
            ) from err
        except ValueError as err:
            raise ParseError(
                token.line, token.column, f"malformed probability {text}", ParseErrorKind.SYNTAX
            ) from err

    def command(self, children: list) -> GuardedCommand:
        name, guard, *updates = children
        self.commands_at.setdefault(str(name), []).append((name.line, name.column))
        return GuardedCommand(str(name), guard, tuple(updates))

    # declarations
    def range(self, children: List[Token]) -> Tuple[int, int]:
        return int(children[0]), int(children[1])

    def var_init(self, children: list) -> VarDecl:
        name = children[0]
        bounds: Optional[Tuple[int, int]] = children[1] if len(children) == 3 else None
        self.declared_at.setdefault(str(name), []).append((name.line, name.column))
        return VarDecl(str(name), int(children[-1]), bounds)

    def decl(self, children: List[VarDecl]) -> List[VarDecl]:
        return list(children)

    def reach(self, children: list) -> _Reach:
        keyword, guard = children[0], children[-1]
        self.reach_at = (keyword.line, keyword.column)
        return _Reach(guard, self.reach_at)

    def start(self, children: list) -> Program:
        decls: List[VarDecl] = []
        commands: List[GuardedCommand] = []
        reach = Guard()
        for item in children:
            if isinstance(item, list):
                decls.extend(item)
            elif isinstance(item, GuardedCommand):
                commands.append(item)
            elif isinstance(item, _Reach):
                reach = item.guard
        return Program(tuple(decls), tuple(commands), reach)

    def position_of(self, error: ProgramError) -> Position:
        subject = error.subject
        if error.kind is ParseErrorKind.INIT_SATISFIES_REACH:
            return self.reach_at
        if error.kind is ParseErrorKind.UNDECLARED_VARIABLE and subject in self.first_use:
            return self.first_use[subject]
        for table in (self.declared_at, self.commands_at):
            if subject in table:
                return table[subject][-1]
        return (1, 1)


def _end_position(text: str) -> Position:
    lines = text.split("\n")
    return len(lines), len(lines[-1]) + 1


def parse_program(text: str) -> Program:
    """Parse program text; every failure is reported as :class:`ParseError`."""
    try:
        tree = _PARSER.parse(text)
    except UnexpectedEOF as err:
        line, column = _end_position(text)
        raise ParseError(line, column, "unexpected end of input", ParseErrorKind.SYNTAX) from err
    except UnexpectedInput as err:
        line = err.line if err.line > 0 else _end_position(text)[0]
        column = err.column if err.column > 0 else _end_position(text)[1]
        message = str(err).strip().splitlines()[0]
        raise ParseError(line, column, message, ParseErrorKind.SYNTAX) from err

    builder = _ProgramBuilder()
    try:
        program = builder.transform(tree)
    except VisitError as err:
        if isinstance(err.orig_exc, ParseError):
            raise err.orig_exc from None
        raise

    try:
        validate_program(program)
    except ProgramError as err:
        line, column = builder.position_of(err)
        raise ParseError(line, column, err.message, err.kind) from err
    LOGGER.debug(
        "Parsed program with %d variables and %d commands",
        len(program.decls),
        len(program.commands),
    )
    return program


def load_program(path: str | Path) -> Program:
    """Read and parse a program file."""
    return parse_program(Path(path).read_text(encoding="utf-8"))


def format_program(program: Program) -> str:
    """Render ``program`` in the surface syntax accepted by :func:`parse_program`."""
    lines: List[str] = []
    for decl in program.decls:
        bounds = f" in [{decl.range[0]},{decl.range[1]}]" if decl.range is not None else ""
        lines.append(f"int {decl.name}{bounds} = {decl.init};")
    for command in program.commands:
        updates = " + ".join(
            f"{update.probability}:({update.assignment.render()})" for update in command.updates
        )
        lines.append(f"{command.name}: {command.guard.render()} -> {updates};")
    lines.append(f"reach: {program.reach.render()}")
    return "\n".join(lines) + "\n"
