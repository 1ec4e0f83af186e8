"""Dense grid scan for the equilibria of small static two-player games."""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from bundle_solve.errors import DomainError, OracleRefusalError
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import Policy

logger = logging.getLogger(__name__)

MAX_GRID_PAIRS = 4_000_000
MAX_CANDIDATES = 200


@dataclass
class NashScanResult:
    """Outcome of a grid scan.

    Attributes:
        equilibria: Distinct approximate equilibria, empty when degenerate
        degenerate: Every grid point is already below the refinement tolerance, so the
            equilibria form a continuum and no count is reported
    """

    equilibria: list[Policy] = field(default_factory=list)
    degenerate: bool = False

    @property
    def count(self) -> int | None:
        return None if self.degenerate else len(self.equilibria)


def simplex_grid(n_actions: int, resolution: int) -> np.ndarray:
    """All points of the probability simplex with coordinates in multiples of 1/resolution."""
    points = [
        c for c in itertools.product(range(resolution + 1), repeat=n_actions - 1)
        if sum(c) <= resolution
    ]
    grid = np.array([[*c, resolution - sum(c)] for c in points], dtype=float)
    return grid / resolution


def _neighbours(grid: np.ndarray, resolution: int) -> np.ndarray:
    """Index array [point][k] of grid neighbours reached by moving one grid step of mass.

    Rows are padded with the point's own index.
    """
    keys = {tuple(np.rint(p * resolution).astype(int)): k for k, p in enumerate(grid)}
    n_actions = grid.shape[1]
    moves = [(a, b) for a in range(n_actions) for b in range(n_actions) if a != b]
    table = np.arange(len(grid))[:, None].repeat(len(moves), axis=1)
    for key, k in keys.items():
        for m, (a, b) in enumerate(moves):
            moved = list(key)
            moved[a] += 1
            moved[b] -= 1
            table[k, m] = keys.get(tuple(moved), k)
    return table


def _payoff_matrices(game: DynamicGame) -> tuple[np.ndarray, np.ndarray]:
    A = game.n_actions
    M = game.utility[0].reshape(A, A, 2)
    return M[:, :, 0], M[:, :, 1]


def best_response_gap(M0: np.ndarray, M1: np.ndarray, p: np.ndarray, q: np.ndarray) -> float:
    """max over players of (best deviation payoff - payoff) at the mixed profile (p, q)."""
    dev0 = M0 @ q
    dev1 = M1.T @ p
    return float(max(dev0.max() - p @ dev0, dev1.max() - q @ dev1))


def _refine(M0: np.ndarray, M1: np.ndarray, p0: np.ndarray, q0: np.ndarray):
    """Minimize the sum of squared positive regrets over both simplices with SLSQP."""
    A = len(p0)

    def objective(x):
        p, q = x[:A], x[A:]
        dev0 = M0 @ q
        dev1 = M1.T @ p
        h0 = np.maximum(dev0 - p @ dev0, 0.0)
        h1 = np.maximum(dev1 - q @ dev1, 0.0)
        value = h0 @ h0 + h1 @ h1
        grad_p = -2.0 * h0.sum() * dev0 + 2.0 * (M1 @ h1 - h1.sum() * (M1 @ q))
        grad_q = 2.0 * (M0.T @ h0 - h0.sum() * (M0.T @ p)) - 2.0 * h1.sum() * dev1
        return value, np.concatenate([grad_p, grad_q])

    ones, zeros = np.ones(A), np.zeros(A)
    constraints = [
        {"type": "eq", "fun": lambda x: x[:A].sum() - 1.0, "jac": lambda x: np.r_[ones, zeros]},
        {"type": "eq", "fun": lambda x: x[A:].sum() - 1.0, "jac": lambda x: np.r_[zeros, ones]},
    ]
    solution = minimize(
        objective,
        np.concatenate([p0, q0]),
        jac=True,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * (2 * A),
        constraints=constraints,
        options={"ftol": 1e-24, "maxiter": 500},
    )
    x = np.clip(solution.x, 0.0, 1.0)
    p, q = x[:A] / x[:A].sum(), x[A:] / x[A:].sum()
    return p, q


def grid_nash_scan(
    game: DynamicGame, resolution: int = 200, refine_tol: float = 1e-6
) -> NashScanResult:
    """Approximate equilibria of a static two-player game by grid scan plus refinement.

    The best-response gap is evaluated on the product of two simplex grids. Local minima
    of the grid (compared against one-step mass moves of either player) are refined, kept
    when their gap falls below ``refine_tol``, and clustered: two equilibria are distinct
    when their infinity distance exceeds ten grid steps.

    Raises:
        DomainError: If the game is not a single-state two-player game with at most 3 actions
        OracleRefusalError: If the grid product exceeds 4e6 points
    """
    if game.n_players != 2 or game.n_states != 1 or game.n_actions > 3:
        raise DomainError("grid scan needs a single-state two-player game with <= 3 actions")
    grid = simplex_grid(game.n_actions, resolution)
    if len(grid) ** 2 > MAX_GRID_PAIRS:
        raise OracleRefusalError(
            f"grid of {len(grid)} points per player is too large; lower the resolution"
        )

    M0, M1 = _payoff_matrices(game)
    dev0 = grid @ M0.T  # [q][a]
    dev1 = grid @ M1  # [p][b]
    gap0 = dev0.max(axis=1)[None, :] - grid @ dev0.T
    gap1 = dev1.max(axis=1)[:, None] - dev1 @ grid.T
    gap = np.maximum(gap0, gap1)  # [p][q]

    if np.all(gap < refine_tol):
        return NashScanResult(degenerate=True)

    nbr = _neighbours(grid, resolution)
    lowest_p = gap[nbr].min(axis=1)
    lowest_q = gap[:, nbr].min(axis=2)
    candidates = np.argwhere((gap <= lowest_p) & (gap <= lowest_q))
    order = np.argsort(gap[candidates[:, 0], candidates[:, 1]], kind="stable")
    candidates = candidates[order][:MAX_CANDIDATES]

    found: list[tuple[np.ndarray, np.ndarray]] = []
    separation = 10.0 / resolution
    for ip, iq in candidates:
        p, q = _refine(M0, M1, grid[ip], grid[iq])
        if best_response_gap(M0, M1, p, q) >= refine_tol:
            continue
        distances = [max(np.max(np.abs(p - fp)), np.max(np.abs(q - fq))) for fp, fq in found]
        if all(d > separation for d in distances):
            found.append((p, q))
    logger.debug("grid scan: %d candidates, %d equilibria", len(candidates), len(found))

    equilibria = [Policy(probs=np.stack([p, q])[None, :, :]) for p, q in found]
    return NashScanResult(equilibria=equilibria)
