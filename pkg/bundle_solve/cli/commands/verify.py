"""Verify command: check a policy file against a game."""

from pathlib import Path

import typer
from rich.console import Console

from bundle_solve.cli.common import (
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    fail,
    format_index,
    max_norm,
    read_game,
    read_policy,
)
from bundle_solve.errors import BundleSolveError
from bundle_solve.solver.verify import nash_gap, verify_epsilon_equilibrium, worst_violation

console = Console()


def verify(
    game_path: Path = typer.Option(..., "--game", "-g", help="Game file (JSON)"),
    policy_path: Path = typer.Option(..., "--policy", "-p", help="Policy file (JSON)"),
    eps: float = typer.Option(1e-4, "--eps", help="Tolerance on the canonical section"),
) -> None:
    """Check whether a policy is an epsilon-perfect equilibrium.

    The test is mass weighted: pi * (best deviation payoff - deviation payoff) < eps for every
    (state, player, action). The unscaled Nash gap is printed alongside.

    Exit code 0 when the policy passes, 1 when it does not, 2 on bad input.
    """
    game = read_game(game_path)
    policy = read_policy(policy_path, game)
    try:
        passed, section = verify_epsilon_equilibrium(game, policy, eps)
        gap = nash_gap(game, policy)
    except BundleSolveError as e:
        fail(str(e))

    index, value = worst_violation(section)
    if passed:
        console.print(f"[green]✓[/green] epsilon-perfect at eps={eps:g}")
    else:
        console.print(f"[red]✗[/red] not epsilon-perfect at eps={eps:g}")
    console.print(f"max canonical section {value:.3e} at {format_index(index)}")
    console.print(f"max Nash gap {max_norm(gap):.3e}")
    raise typer.Exit(EXIT_OK if passed else EXIT_NOT_CONVERGED)
