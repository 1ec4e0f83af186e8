"""Canonical section of the equilibrium bundle and moves along the barrier."""

import numpy as np

from bundle_solve.dp.operators import policy_value
from bundle_solve.errors import DomainError
from bundle_solve.game.contractions import as_probs, deviation_utility, stage_utility
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import BarrierParameter, Policy


def section_from_deviation(probs: np.ndarray, dev: np.ndarray) -> np.ndarray:
    """pi * (max_a dev - dev) for already contracted deviation utilities."""
    return probs * (dev.max(axis=-1, keepdims=True) - dev)


def canonical_section(game: DynamicGame, policy: Policy | np.ndarray, V=None) -> BarrierParameter:
    """Least element of the fiber over ``policy``.

    Args:
        game: The game
        policy: Policy, boundary points allowed
        V: Value function the stage utility is built from; the policy value when omitted

    Returns:
        BarrierParameter whose zeros are exactly the perfect equilibria
    """
    probs = as_probs(policy)
    if V is None:
        V = policy_value(game, probs)
    dev = deviation_utility(game, probs, stage_utility(game, V))
    return BarrierParameter(section_from_deviation(probs, dev))


def _per_player(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[None, :, None]
    if x.ndim == 2:
        return x[:, :, None]
    if x.ndim > 3:
        raise DomainError(f"{name} must be scalar, per player or per (state, player)")
    return x


def canonical_descent_step(
    mu: BarrierParameter | np.ndarray, policy: Policy | np.ndarray, eta, beta=0.0
) -> BarrierParameter:
    """mu' = (1 - eta) mu + beta pi, per (state, player, action).

    Args:
        mu: Current barrier parameter
        policy: Current policy
        eta: Decrease rate in [0, 1), scalar, per player or per (state, player)
        beta: Fiber shift >= 0 with the same broadcasting as eta

    Raises:
        DomainError: If eta leaves [0, 1) or beta is negative
    """
    mu = mu.mu if isinstance(mu, BarrierParameter) else np.asarray(mu, dtype=float)
    eta = _per_player(eta, "eta")
    beta = _per_player(beta, "beta")
    if np.any(eta < 0.0) or np.any(eta >= 1.0):
        raise DomainError(f"eta must lie in [0, 1), got {np.ravel(eta).tolist()}")
    if np.any(beta < 0.0):
        raise DomainError("beta must be >= 0")
    return BarrierParameter((1.0 - eta) * mu + beta * as_probs(policy))


def initial_barrier(policy: Policy | np.ndarray, mu_prime: float) -> BarrierParameter:
    """Starting barrier mu = mu_prime * pi.

    Raises:
        DomainError: If the policy is not strictly interior or mu_prime <= 0
    """
    probs = as_probs(policy)
    if not np.all(probs > 0.0):
        raise DomainError("initial barrier requires a strictly interior policy")
    if not mu_prime > 0.0:
        raise DomainError(f"mu_prime must be > 0, got {mu_prime}")
    return BarrierParameter(mu_prime * probs)
