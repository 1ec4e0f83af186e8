"""Dual value root solve, dual quantities, unbiased objective and its gradient."""

import numpy as np

from bundle_solve.errors import DomainError
from bundle_solve.game.contractions import as_probs, deviation_utility
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import BarrierParameter, Policy
from bundle_solve.models.quantities import DualQuantities

ROOT_TOL = 1e-13
MAX_ROOT_ITERATIONS = 200


def _as_mu(mu: BarrierParameter | np.ndarray) -> np.ndarray:
    return mu.mu if isinstance(mu, BarrierParameter) else np.asarray(mu, dtype=float)


def _solve_shifted(mu: np.ndarray, dev: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Root solve in coordinates relative to the best deviation.

    Returns (x, d, top) with x = v - top and d = dev - top, so that r = x - d is free of the
    cancellation in v - dev when the regret is small next to v.
    """
    mu = np.asarray(mu, dtype=float)
    dev = np.asarray(dev, dtype=float)
    if not np.all(mu > 0.0):
        raise DomainError("barrier parameter must be strictly positive in the dual root solve")

    top = dev.max(axis=-1)
    d = dev - top[..., None]
    lo = mu.min(axis=-1)
    hi = mu.sum(axis=-1) - d.min(axis=-1)
    x = lo.copy()
    active = np.ones(x.shape, dtype=bool)

    for _ in range(MAX_ROOT_ITERATIONS):
        gap = x[..., None] - d
        g = (mu / gap).sum(axis=-1) - 1.0
        slope = -(mu / gap**2).sum(axis=-1)
        lo = np.where(g > 0.0, x, lo)
        hi = np.where(g > 0.0, hi, x)
        step = np.where(active, -g / slope, 0.0)
        candidate = x + step
        outside = (candidate <= lo) | (candidate >= hi)
        candidate = np.where(outside & active, 0.5 * (lo + hi), candidate)
        done = (np.abs(g) <= ROOT_TOL) | (np.abs(candidate - x) <= 4.0 * np.finfo(float).eps * x)
        x = np.where(active, candidate, x)
        active &= ~done
        if not active.any():
            break
    return x, d, top


def solve_dual_values(mu: np.ndarray, dev: np.ndarray) -> np.ndarray:
    """Vectorized dual value root solve over the trailing action axis.

    For every leading index finds the unique v > max(dev) with sum_a mu / (v - dev) = 1.
    The function is convex and decreasing on that interval. Newton iterations start from
    the left end of the bracket (max dev + min mu) and fall back to bisection whenever a
    step leaves the bracket.

    Args:
        mu: Barrier values, shape (..., n_actions), strictly positive
        dev: Deviation utilities, same shape

    Returns:
        Array of shape (...) of dual values

    Raises:
        DomainError: If some mu entry is not strictly positive
    """
    x, _, top = _solve_shifted(mu, dev)
    return x + top


def solve_dual_value(mu_row, dev_row) -> float:
    """Unique root v > max(dev_row) of sum_a mu_a / (v - dev_a) = 1.

    Raises:
        DomainError: If some mu entry is not strictly positive
    """
    return float(solve_dual_values(np.asarray(mu_row, dtype=float), np.asarray(dev_row)))


def dual_from_deviation(probs: np.ndarray, mu: np.ndarray, dev: np.ndarray) -> DualQuantities:
    """Dual quantities from already contracted deviation utilities."""
    x, d, top = _solve_shifted(mu, dev)
    v = x + top
    r = x[..., None] - d
    with np.errstate(divide="ignore"):
        r_hat = mu / probs
    return DualQuantities(v=v, r=r, pi_hat=mu / r, r_hat=r_hat)


def dual_quantities(
    game: DynamicGame,
    policy: Policy | np.ndarray,
    mu: BarrierParameter | np.ndarray,
    stage_u: np.ndarray,
) -> DualQuantities:
    """Dual value, regret, dual policy and dual regret at (policy, mu) for stage utility U.

    Raises:
        DomainError: If mu is not strictly positive
    """
    probs = as_probs(policy)
    return dual_from_deviation(probs, _as_mu(mu), deviation_utility(game, probs, stage_u))


def unbiased_objective(policy: Policy | np.ndarray, dq: DualQuantities) -> float:
    """Primal-dual bias objective sum (pi - pi_hat)(r - r_hat), zero exactly on the bundle."""
    probs = as_probs(policy)
    return float(np.sum((probs - dq.pi_hat) * (dq.r - dq.r_hat)))


def projected_gradient(
    policy: Policy | np.ndarray, dq: DualQuantities, dev_pairs: np.ndarray
) -> np.ndarray:
    """Logit-space gradient of the unbiased objective with the dual value re-solved.

    The stage utility is held fixed; the deviation utilities move with the other players'
    probabilities through ``dev_pairs``. Rows are centered so that adding a constant to a
    (state, player) row of logits has zero first-order effect.

    Args:
        policy: Current interior policy
        dq: Dual quantities at the policy
        dev_pairs: Tensor [state][i][j][a][a'] from deviation_utility_pairs

    Returns:
        Tensor [state][player][action]
    """
    probs = as_probs(policy)
    pi_hat, r = dq.pi_hat, dq.r
    c = probs - pi_hat**2 / probs
    w = pi_hat / r
    w_tilde = w / w.sum(axis=-1, keepdims=True)
    e = c - c.sum(axis=-1, keepdims=True) * w_tilde
    G = c * r - np.einsum("sia,sijab,sjb->sjb", e, dev_pairs, probs)
    return G - G.sum(axis=-1, keepdims=True) * probs
