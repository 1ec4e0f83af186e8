"""Generate command: write a random game file."""

from pathlib import Path

import typer
from rich.console import Console

from bundle_solve.cli.common import fail
from bundle_solve.errors import BundleSolveError
from bundle_solve.game.files import save_game
from bundle_solve.game.generator import generate_random_game

console = Console()


def generate(
    players: int = typer.Option(2, "--players", help="Number of players", min=1),
    states: int = typer.Option(1, "--states", help="Number of states", min=1),
    actions: int = typer.Option(2, "--actions", help="Actions per player", min=1),
    gamma: float = typer.Option(0.0, "--gamma", help="Discount factor in [0, 1)"),
    seed: int = typer.Option(0, "--seed", help="Random seed", min=0),
    output: Path = typer.Option(Path("game.json"), "--output", "-o", help="Game file to write"),
) -> None:
    """Draw a random dynamic game and write it as JSON.

    Utilities are uniform on [0, 1]; transition rows are flat Dirichlet draws.

    Examples:
        $ bundle-solve generate --players 2 --states 1 --actions 2 --gamma 0 --seed 1 -o g.json
    """
    try:
        game = generate_random_game(players, states, actions, gamma, seed)
        save_game(game, output)
    except (BundleSolveError, OSError) as e:
        fail(str(e))

    console.print(
        f"[green]✓[/green] Wrote {output} "
        f"[dim](players={players} states={states} actions={actions} gamma={gamma})[/dim]"
    )
