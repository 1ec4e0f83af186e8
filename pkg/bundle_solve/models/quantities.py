"""Derived quantities of the DP operators and the equilibrium bundle."""

from dataclasses import dataclass

import numpy as np


@dataclass(eq=False)
class ConeDistances:
    """Distances from V to the policy cone and best-response cone boundaries along 1.

    Attributes:
        d: Tensor [state][player], (V - D_pi(V)) / (1 - gamma)
        d_hat: Tensor [state][player], (V - D^_pi(V)) / (1 - gamma); d_hat <= d
    """

    d: np.ndarray
    d_hat: np.ndarray


@dataclass(eq=False)
class DualQuantities:
    """Dual value, regret, dual policy and dual regret at a (policy, mu) pair.

    Attributes:
        v: Tensor [state][player], unique root of sum_a mu / (v - devU) = 1
        r: Tensor [state][player][action], v - devU (> 0 when mu > 0)
        pi_hat: Tensor [state][player][action], mu / r
        r_hat: Tensor [state][player][action], mu / probs
    """

    v: np.ndarray
    r: np.ndarray
    pi_hat: np.ndarray
    r_hat: np.ndarray


@dataclass(eq=False)
class BundleDifferential:
    """Per-state differential of the equilibrium bundle.

    Rows and columns are (player, action) pairs flattened player-major.

    Attributes:
        dlogpi_dlogmu: Tensor [state][(j,a')][(k,a'')], (dpi/pi) / (dmu/mu); NaN where singular
        dv_dlogmu: Tensor [state][player][(k,a'')], mu dv / dmu; NaN where singular
        condition_estimate: Per-state 1-norm condition number estimate of C (inf if singular)
        singular: Per-state flag, condition_estimate above 1 / singular_rcond
    """

    dlogpi_dlogmu: np.ndarray
    dv_dlogmu: np.ndarray
    condition_estimate: np.ndarray
    singular: np.ndarray

    @property
    def any_singular(self) -> bool:
        return bool(np.any(self.singular))
