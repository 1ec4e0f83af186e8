"""Bellman value iteration for single-player games."""

import numpy as np

from bundle_solve.errors import DomainError
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import Policy, ValueFunction

MAX_SWEEPS = 1_000_000


def _action_values(game: DynamicGame, values: np.ndarray) -> np.ndarray:
    return game.utility[:, :, 0] + game.gamma * game.transition @ values


def value_iteration(game: DynamicGame, tol: float = 1e-10) -> tuple[ValueFunction, Policy]:
    """Optimal values and a greedy deterministic policy of a one-player game.

    Iterates V <- max_a (u + gamma T V) from zero until ||dV||_inf < tol (1 - gamma) / gamma,
    which bounds the distance to the optimum by tol. Ties in the greedy policy go to the
    lowest action index.

    Raises:
        DomainError: If the game has more than one player
    """
    if game.n_players != 1:
        raise DomainError(f"value iteration needs a single-player game, got {game.n_players}")
    values = np.zeros(game.n_states)
    if game.gamma == 0.0:
        values = _action_values(game, values).max(axis=1)
    else:
        threshold = tol * (1.0 - game.gamma) / game.gamma
        for _ in range(MAX_SWEEPS):
            updated = _action_values(game, values).max(axis=1)
            delta = np.max(np.abs(updated - values))
            values = updated
            if delta < threshold:
                break

    greedy = np.argmax(_action_values(game, values), axis=1)
    probs = np.zeros((game.n_states, 1, game.n_actions))
    probs[np.arange(game.n_states), 0, greedy] = 1.0
    return ValueFunction(values[:, None]), Policy(probs=probs)
