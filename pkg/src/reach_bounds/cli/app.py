"""Command-line interface: ``analyze``, ``concrete`` and ``audit``."""
from __future__ import annotations

import asyncio
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

import click

from reach_bounds.config import AnalyzeConfig, settings
from reach_bounds.core.errors import ReachBoundsError
from reach_bounds.domains import DomainName
from reach_bounds.infrastructure.export import to_json
from reach_bounds.services.refiner import Heuristic, Query, RefinementStatus
from reach_bounds.workflows.analysis import AnalysisWorkflow

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNCONVERGED = 2

STATUS_EXIT_CODES: Dict[str, int] = {
    RefinementStatus.CONVERGED.value: EXIT_OK,
    RefinementStatus.BUDGET_EXHAUSTED.value: EXIT_UNCONVERGED,
    RefinementStatus.STALLED.value: EXIT_UNCONVERGED,
}

InputPath = click.Path(dir_okay=False, path_type=Path)


def _choice(enum_type) -> click.Choice:
    return click.Choice([member.value for member in enum_type], case_sensitive=False)


def _game_options(func: Callable) -> Callable:
    """Options shared by every command that builds a game."""
    options = [
        click.option("--domain", type=_choice(DomainName), default=None, help="Abstract domain."),
        click.option(
            "--widen-key",
            default=None,
            help="Widening anchor: 'command', 'update' or 'var:<name>'.",
        ),
        click.option(
            "--widen-up-to/--no-widen-up-to",
            default=None,
            help="Keep single-variable guard and reach bounds through widening.",
        ),
        click.option(
            "--depth",
            "depth_threshold",
            type=int,
            default=None,
            help="No widening above this spanning-tree depth.",
        ),
        click.option("--node-budget", type=int, default=None, help="Player-1 node cap."),
        click.option(
            "--emit-game",
            type=InputPath,
            default=None,
            help="Write the (final) game as DOT to this path.",
        ),
        click.option("--json", "as_json", is_flag=True, default=False, help="Print JSON."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _fail(ctx: click.Context, err: Exception) -> None:
    LOGGER.debug("Command failed", exc_info=err)
    click.echo(f"error: {err}", err=True)
    ctx.exit(EXIT_ERROR)


def _run(ctx: click.Context, coroutine) -> Any:
    try:
        return asyncio.run(coroutine)
    except (ReachBoundsError, OSError) as err:
        _fail(ctx, err)


def _format_summary(summary: Dict[str, Any]) -> str:
    lines = [f"{'query':<6} {'lower':>12} {'upper':>12}"]
    for query, (lower, upper) in summary["bounds"].items():
        lines.append(f"{query:<6} {lower:>12.6f} {upper:>12.6f}")
    lines.append(
        f"status: {summary['status']}  rounds: {summary['rounds']}  "
        f"player-1 nodes (max): {summary['game_nodes_max']}  time: {summary['time_ms']:.1f} ms"
    )
    for name, path in summary.get("files", {}).items():
        lines.append(f"{name}: {path}")
    return "\n".join(lines)


@click.group()
@click.option(
    "--log-level",
    default=None,
    help="Logging level (defaults to REACH_BOUNDS_LOG_LEVEL or WARNING).",
)
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str]) -> None:
    """Bounds on extremal reachability probabilities of probabilistic programs."""
    level = (log_level or settings.log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s %(message)s",
    )
    if ctx.obj is None:
        ctx.obj = AnalysisWorkflow()


@cli.command()
@click.argument("input", type=InputPath)
@_game_options
@click.option("--query", type=_choice(Query), default=Query.MAX.value, show_default=True)
@click.option("--heuristic", type=_choice(Heuristic), default=None)
@click.option("-n", "--candidates", type=int, default=None, help="Candidates per round.")
@click.option("--gap-target", type=float, default=None)
@click.option("--tol", type=float, default=None, help="Value-iteration tolerance.")
@click.option("--max-rounds", type=int, default=None)
@click.option(
    "--dump-values",
    type=InputPath,
    default=None,
    help="Write the last round's value vectors and strategies as JSON.",
)
@click.pass_context
def analyze(ctx: click.Context, input: Path, as_json: bool, **options: Any) -> None:
    """Compute lower and upper bounds with the refinement loop."""
    workflow: AnalysisWorkflow = ctx.obj
    try:
        config = AnalyzeConfig.from_settings(input, as_json=as_json, **options)
    except ReachBoundsError as err:
        _fail(ctx, err)
    summary = _run(ctx, workflow.analyze(config))
    click.echo(to_json(summary) if config.as_json else _format_summary(summary))
    ctx.exit(STATUS_EXIT_CODES[summary["status"]])


@cli.command()
@click.argument("input", type=InputPath)
@click.option("--max-states", type=int, default=None, help="Configuration cap.")
@click.option("--tol", type=float, default=None, help="Value-iteration tolerance.")
@click.pass_context
def concrete(
    ctx: click.Context, input: Path, max_states: Optional[int], tol: Optional[float]
) -> None:
    """Exact values from the explicit MDP (bounded programs only)."""
    workflow: AnalysisWorkflow = ctx.obj
    result = _run(ctx, workflow.concrete(input, max_states=max_states, tol=tol))
    click.echo(to_json(result))
    ctx.exit(EXIT_OK)


@cli.command()
@click.argument("input", type=InputPath)
@_game_options
@click.option("--sample-budget", type=int, default=None, help="Concrete states per check.")
@click.pass_context
def audit(
    ctx: click.Context,
    input: Path,
    as_json: bool,
    sample_budget: Optional[int],
    **options: Any,
) -> None:
    """Build one game and check every validity condition."""
    workflow: AnalysisWorkflow = ctx.obj
    try:
        config = AnalyzeConfig.from_settings(input, as_json=as_json, **options)
    except ReachBoundsError as err:
        _fail(ctx, err)
    report = _run(ctx, workflow.audit(config, sample_budget))
    if as_json:
        click.echo(to_json(report))
    else:
        for violation in report["violations"]:
            click.echo(
                f"node {violation['node']}: [{violation['condition']}] {violation['message']}"
            )
        verdict = "valid" if report["ok"] else f"{len(report['violations'])} violations"
        click.echo(
            f"{verdict}: {report['checked_nodes']} player-1 nodes, window {report['window_size']}"
            + (" (sampled)" if report["sampled"] else "")
        )
    ctx.exit(EXIT_OK if report["ok"] else EXIT_ERROR)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point; returns the process exit status."""
    try:
        result = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name="reach-bounds",
            standalone_mode=False,
        )
    except click.ClickException as err:
        err.show()
        return EXIT_ERROR
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_ERROR
    return result if isinstance(result, int) else EXIT_OK
