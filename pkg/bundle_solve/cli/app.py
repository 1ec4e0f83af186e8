"""Main CLI application using Typer and Rich."""

import typer
from rich.console import Console

from bundle_solve.cli.commands import batch, generate, scan, solve, verify
from bundle_solve.logs import configure_logging
from bundle_solve.version import __version__

app = typer.Typer(
    name="bundle-solve",
    help="bundle-solve - perfect equilibria of dynamic games by equilibrium bundle line search",
    add_completion=False,
    no_args_is_help=True,
    rich_markup_mode="rich",
)

console = Console()


def version_callback(value: bool):
    """Display version information and exit."""
    if value:
        console.print(f"[cyan]bundle-solve[/cyan] version [bold]{__version__}[/bold]")
        raise typer.Exit()


@app.callback()
def main(
    version: bool = typer.Option(
        None,
        "--version",
        "-v",
        help="Show version and exit",
        callback=version_callback,
        is_eager=True,
    ),
):
    """
    bundle-solve - epsilon-perfect equilibria of finite discounted dynamic games.

    Set BUNDLE_SOLVE_LOG=info or debug for solver progress on stderr.
    """
    configure_logging()


app.command(name="generate", help="Write a random game file")(generate.generate)
app.command(name="solve", help="Solve a game file")(solve.solve)
app.command(name="verify", help="Check a policy for epsilon-perfect equilibrium")(verify.verify)
app.command(name="scan", help="Rank random policies by canonical section norm")(scan.scan)
app.command(name="batch", help="Solve a batch of random games")(batch.batch)
