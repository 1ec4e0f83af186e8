"""Tensor contractions over joint actions.

All contractions work on the unflattened utility tensor [state][a_0]...[a_N-1][player]
and are expressed as ``np.einsum`` calls with one subscript letter per player.
"""

import numpy as np

from bundle_solve.errors import ShapeError
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import Policy, ValueFunction

STATE = "z"
ACTIONS = "abcdefghijklmnopqrstuvwxy"


def as_probs(policy: Policy | np.ndarray) -> np.ndarray:
    """Probability tensor of a Policy, or the array itself."""
    return policy.probs if isinstance(policy, Policy) else np.asarray(policy, dtype=float)


def as_values(V: ValueFunction | np.ndarray) -> np.ndarray:
    """Value tensor of a ValueFunction, or the array itself."""
    return V.values if isinstance(V, ValueFunction) else np.asarray(V, dtype=float)


def _check_probs(game: DynamicGame, probs: np.ndarray) -> None:
    expected = (game.n_states, game.n_players, game.n_actions)
    if probs.shape != expected:
        raise ShapeError(f"policy has shape {probs.shape}, expected {expected}")
    if game.n_players > len(ACTIONS):
        raise ShapeError(f"at most {len(ACTIONS)} players supported, got {game.n_players}")


def _unflatten(game: DynamicGame, stage_u: np.ndarray) -> np.ndarray:
    expected = (game.n_states, game.n_joint, game.n_players)
    if stage_u.shape != expected:
        raise ShapeError(f"stage utility has shape {stage_u.shape}, expected {expected}")
    return stage_u.reshape((game.n_states, *game.action_shape, game.n_players))


def _contract(tensor: np.ndarray, probs: np.ndarray, keep: tuple[int, ...]) -> np.ndarray:
    """Contract every player axis of ``tensor`` except ``keep`` against that player's probs.

    ``tensor`` is [state][a_0]...[a_N-1]; the result is [state][a_keep0][a_keep1]...
    """
    n_players = probs.shape[1]
    subscripts = [STATE + ACTIONS[:n_players]]
    operands = [tensor]
    for k in range(n_players):
        if k in keep:
            continue
        subscripts.append(STATE + ACTIONS[k])
        operands.append(probs[:, k, :])
    out = STATE + "".join(ACTIONS[k] for k in keep)
    return np.einsum(",".join(subscripts) + "->" + out, *operands)


def joint_policy_prob(game: DynamicGame, policy: Policy | np.ndarray) -> np.ndarray:
    """Probability of every joint action profile, [state][joint_action].

    Raises:
        ShapeError: If the policy does not match the game dimensions
    """
    probs = as_probs(policy)
    _check_probs(game, probs)
    n = game.n_players
    subscripts = ",".join(STATE + ACTIONS[k] for k in range(n))
    joint = np.einsum(
        f"{subscripts}->{STATE}{ACTIONS[:n]}", *(probs[:, k, :] for k in range(n))
    )
    return joint.reshape(game.n_states, game.n_joint)


def deviation_utility(
    game: DynamicGame, policy: Policy | np.ndarray, stage_u: np.ndarray
) -> np.ndarray:
    """Expected stage utility to player i playing action a against the others' policy.

    Returns:
        Tensor [state][player][action]

    Raises:
        ShapeError: On dimension mismatch
    """
    probs = as_probs(policy)
    _check_probs(game, probs)
    U = _unflatten(game, np.asarray(stage_u, dtype=float))
    out = np.empty((game.n_states, game.n_players, game.n_actions))
    for i in range(game.n_players):
        out[:, i, :] = _contract(U[..., i], probs, (i,))
    return out


def deviation_utility_pairs(
    game: DynamicGame, policy: Policy | np.ndarray, stage_u: np.ndarray
) -> np.ndarray:
    """Expected stage utility to player i when i plays a and j plays a'.

    The i == j blocks are zero.

    Returns:
        Tensor [state][player_i][player_j][action_a][action_a']

    Raises:
        ShapeError: On dimension mismatch
    """
    probs = as_probs(policy)
    _check_probs(game, probs)
    U = _unflatten(game, np.asarray(stage_u, dtype=float))
    n, A = game.n_players, game.n_actions
    out = np.zeros((game.n_states, n, n, A, A))
    for i in range(n):
        for j in range(n):
            if i != j:
                out[:, i, j] = _contract(U[..., i], probs, (i, j))
    return out


def stage_utility(game: DynamicGame, V: ValueFunction | np.ndarray) -> np.ndarray:
    """One-step utility plus discounted continuation, u + gamma * T V.

    Returns:
        Tensor [state][joint_action][player]

    Raises:
        ShapeError: If V is not [state][player]
    """
    values = as_values(V)
    expected = (game.n_states, game.n_players)
    if values.shape != expected:
        raise ShapeError(f"value function has shape {values.shape}, expected {expected}")
    if game.gamma == 0.0:
        return np.array(game.utility)
    return game.utility + game.gamma * np.einsum("sjt,ti->sji", game.transition, values)
