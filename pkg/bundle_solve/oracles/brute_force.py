"""Loop-based reference contractions and a finite-difference derivative."""

import itertools
from collections.abc import Callable

import numpy as np

from bundle_solve.errors import DomainError, OracleRefusalError
from bundle_solve.game.contractions import as_probs
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import Policy

MAX_PROFILES = 1_000_000


def brute_force_contractions(
    game: DynamicGame, policy: Policy | np.ndarray, stage_u: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Joint probabilities, deviation utilities and pair deviation utilities by explicit loops.

    Joint action profiles are enumerated with ``itertools.product``, which yields them in
    row-major order with player 0 slowest, matching the flattened joint index.

    Returns:
        (joint [s][A], devU [s][i][a], devU_pairs [s][i][j][a][a'])

    Raises:
        OracleRefusalError: If there are more than 1e6 joint action profiles
    """
    if game.n_joint > MAX_PROFILES:
        raise OracleRefusalError(
            f"{game.n_joint} joint action profiles exceeds the oracle cap of {MAX_PROFILES}"
        )
    probs = as_probs(policy)
    n, A, S = game.n_players, game.n_actions, game.n_states
    joint = np.zeros((S, game.n_joint))
    dev = np.zeros((S, n, A))
    pairs = np.zeros((S, n, n, A, A))

    for s in range(S):
        for index, profile in enumerate(itertools.product(range(A), repeat=n)):
            weights = [probs[s, k, profile[k]] for k in range(n)]
            joint[s, index] = np.prod(weights)
            for i in range(n):
                others = np.prod([weights[k] for k in range(n) if k != i])
                dev[s, i, profile[i]] += others * stage_u[s, index, i]
                for j in range(n):
                    if j == i:
                        continue
                    rest = np.prod([weights[k] for k in range(n) if k not in (i, j)])
                    pairs[s, i, j, profile[i], profile[j]] += rest * stage_u[s, index, i]
    return joint, dev, pairs


def finite_difference_directional(
    f: Callable[[np.ndarray], float], point: np.ndarray, direction: np.ndarray, h: float = 1e-5
) -> float:
    """Central difference (f(x + h d) - f(x - h d)) / (2 h).

    Raises:
        DomainError: If h is not positive
    """
    if not h > 0.0:
        raise DomainError(f"step h must be > 0, got {h}")
    point = np.asarray(point, dtype=float)
    direction = np.asarray(direction, dtype=float)
    return (f(point + h * direction) - f(point - h * direction)) / (2.0 * h)
