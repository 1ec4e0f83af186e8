"""Common utilities for CLI commands."""

import json
from pathlib import Path
from typing import NoReturn

import numpy as np
import typer
from rich.console import Console
from rich.table import Table

from bundle_solve.errors import BundleSolveError
from bundle_solve.game.files import load_game, load_policy
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import Policy
from bundle_solve.solver.config import SolveConfig

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_BAD_INPUT = 2

console = Console()


def fail(message: str, code: int = EXIT_BAD_INPUT) -> NoReturn:
    """Print an error line and exit with ``code``."""
    console.print(f"[red]✗[/red] Error: {message}")
    raise typer.Exit(code)


def read_game(path: Path) -> DynamicGame:
    """Load a game file, exiting with code 2 on any input problem."""
    if not path.exists():
        fail(f"Game file '{path}' not found")
    try:
        return load_game(path)
    except (BundleSolveError, OSError, json.JSONDecodeError) as e:
        fail(f"{path}: {e}")


def read_policy(path: Path, game: DynamicGame) -> Policy:
    """Load a policy file checked against ``game``, exiting with code 2 on any problem."""
    if not path.exists():
        fail(f"Policy file '{path}' not found")
    try:
        return load_policy(path, game)
    except (BundleSolveError, OSError) as e:
        fail(f"{path}: {e}")


def build_config(config_path: Path | None, **overrides) -> SolveConfig:
    """SolveConfig from an optional TOML file with explicit flag overrides on top.

    Flags left as None keep the file or default value.
    """
    if config_path is not None and not config_path.exists():
        fail(f"Config file '{config_path}' not found")
    try:
        return SolveConfig.load(config_path).replace(**overrides)
    except BundleSolveError as e:
        fail(str(e))


def policy_table(policy: Policy, title: str | None = None) -> Table:
    """Rich table with one row per (state, player) and one column per action."""
    S, N, A = policy.shape
    table = Table(title=title, show_header=True, header_style="bold")
    table.add_column("state", justify="right")
    table.add_column("player", justify="right")
    for a in range(A):
        table.add_column(f"a{a}", justify="right")
    for s in range(S):
        for i in range(N):
            table.add_row(str(s), str(i), *(f"{p:.6f}" for p in policy.probs[s, i]))
    return table


def format_index(index: tuple[int, ...]) -> str:
    return "".join(f"[{k}]" for k in index)


def max_norm(array: np.ndarray) -> float:
    return float(np.max(np.abs(array))) if array.size else 0.0
