"""Batch command: solve many random games and summarise."""

import json
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.table import Table

from bundle_solve.cli.common import EXIT_NOT_CONVERGED, EXIT_OK, build_config, fail
from bundle_solve.errors import BundleSolveError
from bundle_solve.solver.batch import run_batch

console = Console()


def batch(
    count: int = typer.Option(10, "--count", help="Number of games", min=0),
    players: int = typer.Option(3, "--players", help="Players per game", min=1),
    states: int = typer.Option(3, "--states", help="States per game", min=1),
    actions: int = typer.Option(3, "--actions", help="Actions per player", min=1),
    gamma: float = typer.Option(0.5, "--gamma", help="Discount factor in [0, 1)"),
    eps: Optional[float] = typer.Option(None, "--eps", help="Target canonical section norm"),
    seed: int = typer.Option(0, "--seed", help="Base seed", min=0),
    jobs: int = typer.Option(1, "--jobs", help="Worker processes", min=1),
    output: Path = typer.Option(
        Path("batch_summary.json"), "--output", "-o", help="Summary file"
    ),
    trace_dir: Optional[Path] = typer.Option(None, "--trace-dir", help="Per-game JSONL traces"),
    config_path: Optional[Path] = typer.Option(None, "--config", help="TOML file with [solver]"),
    max_inner: Optional[int] = typer.Option(None, "--max-inner", help="Inner step cap"),
    max_outer: Optional[int] = typer.Option(None, "--max-outer", help="Outer step cap"),
) -> None:
    """Generate and solve random games with derived per-game seeds.

    Game i uses seed (base seed) XOR (i * 0x9E3779B9), so results do not depend on --jobs.
    Exit code 0 when every game converged, 1 otherwise.

    Examples:
        $ bundle-solve batch --count 5 --players 2 --states 2 --actions 2 --gamma 0.5 --eps 1e-3
    """
    if not 0.0 <= gamma < 1.0:
        fail(f"gamma must lie in [0, 1), got {gamma}")
    cfg = build_config(config_path, outer_tol_eps=eps, max_inner=max_inner, max_outer=max_outer)

    try:
        summary = run_batch(
            count,
            (players, states, actions, gamma),
            cfg,
            base_seed=seed,
            jobs=jobs,
            trace_dir=trace_dir,
        )
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(json.dumps(summary.to_dict(), indent=2) + "\n", encoding="utf-8")
    except (BundleSolveError, OSError) as e:
        fail(str(e))

    table = Table(show_header=True, header_style="bold")
    for column in ("game", "seed", "status", "outer", "inner", "eps", "seconds"):
        table.add_column(column, justify="right")
    for i, r in enumerate(summary.records):
        table.add_row(
            str(i),
            str(r.seed),
            r.status,
            str(r.outer_steps),
            str(r.inner_steps),
            f"{r.eps_achieved:.2e}",
            f"{r.wall_seconds:.2f}",
        )
    if summary.records:
        console.print(table)
    console.print(
        f"{summary.n_converged}/{summary.n_games} converged at eps={summary.eps:g} "
        f"[dim]({output})[/dim]"
    )
    raise typer.Exit(EXIT_OK if summary.all_converged else EXIT_NOT_CONVERGED)
