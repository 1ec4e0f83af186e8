"""Random dynamic game generation."""

import numpy as np

from bundle_solve.errors import DomainError
from bundle_solve.models.game import DynamicGame


def generate_random_game(
    n_players: int, n_states: int, n_actions: int, gamma: float, seed: int
) -> DynamicGame:
    """Draw a random dynamic game.

    Utilities are i.i.d. uniform on [0, 1]. Each transition row is a flat Dirichlet draw,
    built as normalized i.i.d. exponentials.

    Args:
        n_players: Number of players (>= 1)
        n_states: Number of states (>= 1)
        n_actions: Actions per player (>= 1)
        gamma: Discount factor in [0, 1)
        seed: Seed for ``numpy.random.default_rng``

    Returns:
        A validated DynamicGame; identical arguments give bit-identical games

    Raises:
        DomainError: If a count is below 1 or gamma lies outside [0, 1)
    """
    for name, value in (("players", n_players), ("states", n_states), ("actions", n_actions)):
        if value < 1:
            raise DomainError(f"{name} must be >= 1, got {value}")
    if not (0.0 <= gamma < 1.0):
        raise DomainError(f"gamma must lie in [0, 1), got {gamma}")

    rng = np.random.default_rng(seed)
    n_joint = n_actions**n_players
    utility = rng.uniform(0.0, 1.0, size=(n_states, n_joint, n_players))
    weights = rng.exponential(1.0, size=(n_states, n_joint, n_states))
    transition = weights / weights.sum(axis=2, keepdims=True)
    return DynamicGame(
        n_players=n_players,
        n_states=n_states,
        n_actions=n_actions,
        gamma=gamma,
        utility=utility,
        transition=transition,
    )
