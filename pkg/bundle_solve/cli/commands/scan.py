"""Scan command: rank random policies by canonical section norm."""

from pathlib import Path

import typer
from rich.console import Console

from bundle_solve.cli.common import fail, policy_table, read_game
from bundle_solve.errors import BundleSolveError
from bundle_solve.solver.verify import scan_policy_space

console = Console()


def scan(
    game_path: Path = typer.Option(..., "--game", "-g", help="Game file (JSON)"),
    samples: int = typer.Option(1000, "--samples", help="Number of random policies", min=1),
    seed: int = typer.Option(0, "--seed", help="Sampling seed", min=0),
    top: int = typer.Option(5, "--top", help="How many of the best samples to print", min=1),
) -> None:
    """Sample policies uniformly and print the ones closest to an equilibrium."""
    game = read_game(game_path)
    try:
        ranked = scan_policy_space(game, samples, seed)
    except BundleSolveError as e:
        fail(str(e))

    for rank, (policy, norm) in enumerate(ranked[:top], start=1):
        console.print(policy_table(policy, title=f"#{rank}  canonical section norm {norm:.3e}"))
