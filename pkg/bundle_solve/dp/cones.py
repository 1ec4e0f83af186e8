"""Policy cone and best-response cone geometry."""

import numpy as np

from bundle_solve.dp.operators import apply_D, apply_Dhat
from bundle_solve.game.contractions import as_values
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import Policy
from bundle_solve.models.quantities import ConeDistances

CONE_TOL = 1e-12


def in_policy_cone(game: DynamicGame, policy: Policy | np.ndarray, V) -> bool:
    """True iff V >= D_pi(V) elementwise (up to -1e-12)."""
    values = as_values(V)
    return bool(np.all(values - apply_D(game, policy, values).values >= -CONE_TOL))


def in_best_response_cone(game: DynamicGame, policy: Policy | np.ndarray, V) -> bool:
    """True iff V >= D^_pi(V) elementwise (up to -1e-12)."""
    values = as_values(V)
    return bool(np.all(values - apply_Dhat(game, policy, values).values >= -CONE_TOL))


def cone_distances(game: DynamicGame, policy: Policy | np.ndarray, V) -> ConeDistances:
    """Distances along 1 from V to the apexes of the two cones through V."""
    values = as_values(V)
    scale = 1.0 - game.gamma
    d = (values - apply_D(game, policy, values).values) / scale
    d_hat = (values - apply_Dhat(game, policy, values).values) / scale
    return ConeDistances(d=d, d_hat=d_hat)


def min_shift_to_best_response_cone(
    game: DynamicGame, policy: Policy | np.ndarray, V
) -> np.ndarray:
    """Smallest per-player m >= 0 with V + m 1 in the best-response cone.

    D^(V + m 1) = D^(V) + gamma m, so the constraint per (state, player) reads
    (1 - gamma) m >= D^(V) - V.
    """
    values = as_values(V)
    excess = apply_Dhat(game, policy, values).values - values
    return np.maximum(0.0, excess.max(axis=0) / (1.0 - game.gamma))
