"""Command-line front end."""

from reach_bounds.cli.app import cli, main

__all__ = ["cli", "main"]
