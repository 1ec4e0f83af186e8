"""Batch runs over random games."""

import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

from bundle_solve.game.generator import generate_random_game
from bundle_solve.models.result import BatchRecord, BatchSummary, SolveStatus
from bundle_solve.solver.config import SolveConfig
from bundle_solve.solver.line_search import solve
from bundle_solve.solver.records import write_trace

logger = logging.getLogger(__name__)

SEED_STRIDE = 0x9E3779B9


def game_seed(base_seed: int, index: int) -> int:
    """Per-game seed, base_seed XOR (index * 0x9E3779B9)."""
    return base_seed ^ (index * SEED_STRIDE)


def _run_one(
    index: int,
    seed: int,
    shape: tuple[int, int, int, float],
    cfg: SolveConfig,
    trace_dir: Path | None,
) -> tuple[int, BatchRecord]:
    n_players, n_states, n_actions, gamma = shape
    game = generate_random_game(n_players, n_states, n_actions, gamma, seed)
    started = time.perf_counter()
    result, trace = solve(game, cfg.replace(seed=seed))
    elapsed = time.perf_counter() - started
    if trace_dir is not None:
        write_trace(trace, trace_dir / f"game_{index:05d}.jsonl")
    return index, BatchRecord(
        seed=seed,
        status=result.status.value,
        outer_steps=result.outer_steps_total,
        inner_steps=result.inner_steps_total,
        eps_achieved=result.eps_achieved,
        wall_seconds=elapsed,
    )


def run_batch(
    count: int,
    shape: tuple[int, int, int, float],
    cfg: SolveConfig,
    base_seed: int = 0,
    jobs: int = 1,
    trace_dir: Path | None = None,
) -> BatchSummary:
    """Generate and solve ``count`` random games.

    Game ``i`` uses seed ``game_seed(base_seed, i)`` for both generation and the solver, so
    per-game outcomes do not depend on ``jobs`` or scheduling order.

    Args:
        count: Number of games (0 gives an empty summary)
        shape: (players, states, actions, gamma)
        cfg: Solver settings shared by every game
        base_seed: Base seed for the per-game seed derivation
        jobs: Worker processes; 1 runs inline
        trace_dir: Optional directory for per-game JSONL traces

    Returns:
        BatchSummary with records ordered by game index
    """
    seeds = [game_seed(base_seed, i) for i in range(count)]
    records: dict[int, BatchRecord] = {}

    if jobs <= 1 or count <= 1:
        for i, seed in enumerate(seeds):
            index, record = _run_one(i, seed, shape, cfg, trace_dir)
            records[index] = record
            logger.info("game %d/%d: %s", index + 1, count, record.status)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futures = [
                ex.submit(_run_one, i, seed, shape, cfg, trace_dir) for i, seed in enumerate(seeds)
            ]
            for f in as_completed(futures):
                index, record = f.result()
                records[index] = record
                logger.info("game %d/%d: %s", index + 1, count, record.status)

    ordered = [records[i] for i in range(count)]
    n_converged = sum(1 for r in ordered if r.status == SolveStatus.CONVERGED.value)
    return BatchSummary(
        n_games=count, n_converged=n_converged, eps=cfg.outer_tol_eps, records=ordered
    )
