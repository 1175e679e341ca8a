"""Graphviz DOT rendering of game arenas."""
from __future__ import annotations

from pathlib import Path
from typing import List

from reach_bounds.core.game import Game, GameNode, NodeKind
from reach_bounds.domains.base import AbstractDomain

ACCEPT_LABEL = "⊙"
REJECT_LABEL = "⊗"


def _gvquote(text: str) -> str:
    return '"{}"'.format(text.replace("\\", "\\\\").replace('"', r"\""))


def _node_line(index: int, node: GameNode, domain: AbstractDomain) -> str:
    if node.kind is NodeKind.PLAYER1:
        attrs = f"shape=box, label={_gvquote(domain.render(node.element))}"
    elif node.kind is NodeKind.ACCEPT:
        attrs = f"shape=doublecircle, label={_gvquote(ACCEPT_LABEL)}"
    elif node.kind is NodeKind.REJECT:
        attrs = f"shape=doublecircle, label={_gvquote(REJECT_LABEL)}"
    elif node.kind is NodeKind.PLAYER2_FINAL:
        attrs = f"shape=circle, label={_gvquote(ACCEPT_LABEL + '?')}"
    elif node.kind is NodeKind.PLAYER2_COMMAND:
        attrs = f"shape=circle, label={_gvquote(node.command or '')}"
    else:
        label = f"{node.command}: {domain.render(node.refined)}"
        attrs = f"shape=box, style=filled, fillcolor=lightgrey, label={_gvquote(label)}"
    return f"\tn{index} [{attrs}];"


def render_game(game: Game, domain: AbstractDomain, name: str = "game") -> str:
    """DOT text with one statement per node and one per edge, in node-id order."""
    lines: List[str] = [f"digraph {_gvquote(name)} {{", "\trankdir=TB;"]
    for index, node in enumerate(game.nodes):
        line = _node_line(index, node, domain)
        if index == game.start:
            line = line[:-2] + ", penwidth=2];"
        lines.append(line)
    for index, node in enumerate(game.nodes):
        if node.is_probabilistic:
            for target, probability in game.distributions[index]:
                label = format(float(probability), "g")
                lines.append(f"\tn{index} -> n{target} [style=dashed, label={_gvquote(label)}];")
        else:
            for target in game.successors(index):
                lines.append(f"\tn{index} -> n{target};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_game(game: Game, domain: AbstractDomain, path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(render_game(game, domain), encoding="utf-8")
    return target
