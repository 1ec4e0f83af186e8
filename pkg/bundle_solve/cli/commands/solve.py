"""Solve command: run the bundle line search on a game file."""

from pathlib import Path
from typing import Optional

import typer
from rich.console import Console

from bundle_solve.cli.common import (
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    build_config,
    fail,
    policy_table,
    read_game,
    read_policy,
)
from bundle_solve.errors import BundleSolveError
from bundle_solve.game.files import save_policy
from bundle_solve.solver.line_search import solve as run_solve
from bundle_solve.solver.records import write_result, write_trace
from bundle_solve.solver.verify import distinct_equilibria, run_starts

console = Console()


def solve(
    game_path: Path = typer.Option(..., "--game", "-g", help="Game file (JSON)"),
    output: Path = typer.Option(Path("result.json"), "--output", "-o", help="Result file"),
    config_path: Optional[Path] = typer.Option(None, "--config", help="TOML file with [solver]"),
    eps: Optional[float] = typer.Option(None, "--eps", help="Target canonical section norm"),
    eta: Optional[float] = typer.Option(None, "--eta", help="Barrier decrease rate in (0, 1)"),
    inner_step: Optional[str] = typer.Option(
        None, "--inner-step", help="Inner update: newton or gradient"
    ),
    step: Optional[float] = typer.Option(None, "--step", help="Projected-gradient step size"),
    max_inner: Optional[int] = typer.Option(None, "--max-inner", help="Inner step cap"),
    max_outer: Optional[int] = typer.Option(None, "--max-outer", help="Outer step cap"),
    mu_prime: Optional[float] = typer.Option(None, "--mu-prime", help="Initial barrier factor"),
    m_factor: Optional[float] = typer.Option(None, "--m-factor", help="DP shift factor"),
    m_decay: Optional[float] = typer.Option(None, "--m-decay", help="Shift decay per outer step"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for multi-start sampling"),
    trace: Optional[Path] = typer.Option(None, "--trace", help="Write the JSONL trace here"),
    policy_out: Optional[Path] = typer.Option(None, "--policy-out", help="Write the policy here"),
    initial: Optional[Path] = typer.Option(None, "--initial", help="Interior starting policy"),
    starts: int = typer.Option(1, "--starts", help="Solve from the K best scan samples", min=1),
    samples: int = typer.Option(1000, "--samples", help="Scan samples for --starts", min=1),
) -> None:
    """Compute an epsilon-perfect equilibrium of a game file.

    Exit code 0 when converged, 1 when an iteration cap or numerical failure stopped the
    run (the partial result is still written), 2 on bad input.

    Examples:
        $ bundle-solve solve --game g.json --eps 1e-6 --trace trace.jsonl
        $ bundle-solve solve --game g.json --starts 5 --samples 2000
    """
    game = read_game(game_path)
    cfg = build_config(
        config_path,
        outer_tol_eps=eps,
        eta=eta,
        inner_step=inner_step,
        step_size=step,
        max_inner=max_inner,
        max_outer=max_outer,
        mu_prime_factor=mu_prime,
        m_factor=m_factor,
        m_decay=m_decay,
        seed=seed,
    )
    if initial is not None and starts > 1:
        fail("--initial and --starts cannot be combined")
    initial_policy = read_policy(initial, game) if initial is not None else None

    try:
        if starts > 1:
            runs = run_starts(game, cfg, n_samples=samples, n_starts=starts)
            distinct = distinct_equilibria([run_result for run_result, _ in runs])
            if distinct:
                result = distinct[0]
                records = next(run_trace for run_result, run_trace in runs if run_result is result)
            else:
                result, records = min(runs, key=lambda run: run[0].eps_achieved)
                console.print(
                    f"[yellow]No start out of {len(runs)} converged; best eps kept[/yellow]"
                )
            for k, other in enumerate(distinct[1:], start=2):
                console.print(f"[dim]equilibrium {k}: eps={other.eps_achieved:.3e}[/dim]")
                console.print(policy_table(other.policy))
        else:
            result, records = run_solve(game, cfg, initial_policy=initial_policy)
        if trace is not None:
            write_trace(records, trace)
            console.print(f"[dim]Trace: {trace} ({len(records)} records)[/dim]")
        write_result(result, output)
        if policy_out is not None:
            save_policy(result.policy, policy_out)
    except (BundleSolveError, OSError) as e:
        fail(str(e))

    colour = "green" if result.converged else "yellow"
    console.print(
        f"[{colour}]{result.status.value}[/{colour}] eps={result.eps_achieved:.3e} "
        f"outer={result.outer_steps_total} inner={result.inner_steps_total}"
    )
    console.print(policy_table(result.policy))
    console.print(f"[dim]Result: {output}[/dim]")
    raise typer.Exit(EXIT_OK if result.converged else EXIT_NOT_CONVERGED)
