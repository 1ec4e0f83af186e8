"""Dynamic programming operators and exact policy evaluation."""

import logging
import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from bundle_solve.errors import DomainError, SingularSystemError
from bundle_solve.game.contractions import (
    as_probs,
    as_values,
    deviation_utility,
    joint_policy_prob,
    stage_utility,
)
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import Policy, ValueFunction

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-12


def shift_vector(game: DynamicGame, m) -> np.ndarray:
    """Broadcast a scalar or per-player shift to shape [player], rejecting negatives."""
    m = np.broadcast_to(np.asarray(m, dtype=float), (game.n_players,))
    if np.any(m < 0.0) or not np.all(np.isfinite(m)):
        raise DomainError(f"shift m must be finite and >= 0, got {m.tolist()}")
    return m


def apply_D(game: DynamicGame, policy: Policy | np.ndarray, V) -> ValueFunction:
    """On-policy expectation of the stage utility at V.

    Returns:
        ValueFunction [state][player], sum over joint actions of prob * (u + gamma T V)
    """
    U = stage_utility(game, V)
    joint = joint_policy_prob(game, policy)
    return ValueFunction(np.einsum("sj,sji->si", joint, U))


def apply_Dhat(game: DynamicGame, policy: Policy | np.ndarray, V) -> ValueFunction:
    """Per-player best-response value of the stage utility at V."""
    dev = deviation_utility(game, policy, stage_utility(game, V))
    return ValueFunction(dev.max(axis=2))


def policy_value(game: DynamicGame, policy: Policy | np.ndarray) -> ValueFunction:
    """Exact value of a policy, solving (I - gamma T_pi) V_i = u_pi,i for every player.

    One dense LU factorization is shared by all players.

    Raises:
        SingularSystemError: If the factorization yields non-finite values
    """
    joint = joint_policy_prob(game, policy)
    u_pi = np.einsum("sj,sji->si", joint, game.utility)
    if game.gamma == 0.0:
        return ValueFunction(u_pi)
    T_pi = np.einsum("sj,sjt->st", joint, game.transition)
    system = np.eye(game.n_states) - game.gamma * T_pi
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            values = lu_solve(lu_factor(system, check_finite=False), u_pi, check_finite=False)
        except (LinAlgWarning, np.linalg.LinAlgError, ValueError) as e:
            raise SingularSystemError(f"policy evaluation system is singular: {e}") from e
    if not np.all(np.isfinite(values)):
        raise SingularSystemError("policy evaluation produced non-finite values")
    return ValueFunction(values)


def dp_step(game: DynamicGame, policy: Policy | np.ndarray, V, m=0.0) -> ValueFunction:
    """One shifted DP iteration, D_pi(V + m 1).

    Args:
        game: The game
        policy: Policy to evaluate
        V: Current value iterate
        m: Scalar or per-player shift, >= 0

    Raises:
        DomainError: If m is negative
    """
    values = as_values(V) + shift_vector(game, m)
    return apply_D(game, policy, values)


def regret_objective(
    game: DynamicGame, policy: Policy | np.ndarray, V, weights=None
) -> tuple[float, bool]:
    """Dynamic regret-minimization objective with v = V.

    Returns sum_s w_s sum_i sum_a pi * r with r = V - devU(u + gamma T V), together with
    feasibility (every r >= -1e-12, i.e. V lies in the best-response cone).

    Raises:
        DomainError: If a state weight is not strictly positive
    """
    values = as_values(V)
    probs = as_probs(policy)
    if weights is None:
        weights = np.ones(game.n_states)
    weights = np.broadcast_to(np.asarray(weights, dtype=float), (game.n_states,))
    if np.any(weights <= 0.0):
        raise DomainError("state weights must be strictly positive")
    dev = deviation_utility(game, probs, stage_utility(game, values))
    r = values[:, :, None] - dev
    objective = float(np.einsum("s,sia,sia->", weights, probs, r))
    return objective, bool(np.all(r >= -FEASIBILITY_TOL))
