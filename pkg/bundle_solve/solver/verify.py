"""Equilibrium verification, policy-space scanning and multi-start solving."""

import logging

import numpy as np

from bundle_solve.bundle.section import canonical_section
from bundle_solve.dp.operators import policy_value
from bundle_solve.errors import DomainError
from bundle_solve.game.contractions import as_probs, deviation_utility, stage_utility
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import BarrierParameter, Policy
from bundle_solve.models.result import SolveResult, TraceRecord
from bundle_solve.solver.config import SolveConfig
from bundle_solve.solver.line_search import solve

logger = logging.getLogger(__name__)

DISTINCT_TOL = 1e-3
START_FLOOR = 1e-12


def verify_epsilon_equilibrium(
    game: DynamicGame, policy: Policy | np.ndarray, eps: float
) -> tuple[bool, BarrierParameter]:
    """Mass-weighted epsilon test: every canonical section entry at the policy value < eps.

    Returns:
        (passed, canonical section)
    """
    section = canonical_section(game, policy)
    return bool(np.all(section.mu < eps)), section


def worst_violation(section: BarrierParameter) -> tuple[tuple[int, int, int], float]:
    """Index (state, player, action) and value of the largest canonical section entry."""
    flat = int(np.argmax(section.mu))
    s, i, a = np.unravel_index(flat, section.mu.shape)
    return (int(s), int(i), int(a)), float(section.mu[s, i, a])


def nash_gap(game: DynamicGame, policy: Policy | np.ndarray) -> np.ndarray:
    """Unscaled best-response gap max_a devU - pi . devU at the policy value, [state][player]."""
    probs = as_probs(policy)
    dev = deviation_utility(game, probs, stage_utility(game, policy_value(game, probs)))
    return dev.max(axis=-1) - np.sum(probs * dev, axis=-1)


def scan_policy_space(
    game: DynamicGame, n_samples: int, seed: int
) -> list[tuple[Policy, float]]:
    """Rank random policies by the infinity norm of their canonical section.

    Rows are drawn from the flat Dirichlet distribution with ``numpy.random.default_rng``.

    Returns:
        ``n_samples`` (policy, norm) pairs sorted ascending; ties keep draw order

    Raises:
        DomainError: If n_samples < 1
    """
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    rng = np.random.default_rng(seed)
    ones = np.ones(game.n_actions)
    samples = rng.dirichlet(ones, size=(n_samples, game.n_states, game.n_players))

    scored = []
    for probs in samples:
        norm = canonical_section(game, probs).norm()
        scored.append((Policy(probs=probs), norm))
    order = np.argsort([norm for _, norm in scored], kind="stable")
    return [scored[k] for k in order]


def _interior(policy: Policy) -> Policy:
    probs = np.maximum(policy.probs, START_FLOOR)
    return Policy(probs=probs / probs.sum(axis=-1, keepdims=True))


def run_starts(
    game: DynamicGame,
    cfg: SolveConfig | None = None,
    n_samples: int = 1000,
    n_starts: int = 5,
) -> list[tuple[SolveResult, list[TraceRecord]]]:
    """Solve from each of the ``n_starts`` lowest-norm scan samples.

    Returns:
        One (result, trace) pair per start, in scan order, converged or not
    """
    cfg = cfg or SolveConfig()
    candidates = scan_policy_space(game, n_samples, cfg.seed)[:n_starts]
    runs = []
    for k, (start, norm) in enumerate(candidates):
        logger.info("multistart %d/%d from sample with norm %.3e", k + 1, len(candidates), norm)
        runs.append(solve(game, cfg, initial_policy=_interior(start)))
    return runs


def distinct_equilibria(results: list[SolveResult]) -> list[SolveResult]:
    """Converged results with duplicates removed, sorted by eps_achieved.

    Two results are the same equilibrium when their policies are within 1e-3 in the
    infinity norm; the one with the smaller eps_achieved is kept.
    """
    distinct: list[SolveResult] = []
    for result in sorted((r for r in results if r.converged), key=lambda r: r.eps_achieved):
        if all(
            np.max(np.abs(result.policy.probs - kept.policy.probs)) >= DISTINCT_TOL
            for kept in distinct
        ):
            distinct.append(result)
    return distinct


def solve_multistart(
    game: DynamicGame,
    cfg: SolveConfig | None = None,
    n_samples: int = 1000,
    n_starts: int = 5,
) -> list[SolveResult]:
    """Solve from the lowest-norm scan samples and keep the distinct converged equilibria.

    Returns:
        Distinct converged results sorted by eps_achieved
    """
    runs = run_starts(game, cfg, n_samples, n_starts)
    return distinct_equilibria([result for result, _ in runs])
