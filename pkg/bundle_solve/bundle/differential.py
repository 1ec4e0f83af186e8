"""Bundle coefficient matrix, its factorization, and the bundle differential.

Per state, rows and columns of the coefficient matrix are ordered as the flattened
(player, action) pairs followed by one row/column per player:

    C = [[H, B^], [B., 0]],  H = Diag(r) - K,  K[(i,a),(j,a')] = devU_pairs[i][j][a][a'] pi[j][a']

with B^[(i,a)][l] = [i = l] and B.[m][(j,a')] = pi[j][a'] [j = m].
"""

import logging
import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, get_lapack_funcs, lu_factor, lu_solve
from scipy.special import softmax

from bundle_solve.bundle.dual import dual_from_deviation, projected_gradient
from bundle_solve.game.contractions import as_probs, deviation_utility, deviation_utility_pairs
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import BarrierParameter, Policy
from bundle_solve.models.quantities import BundleDifferential, DualQuantities

logger = logging.getLogger(__name__)

TRUST_RADIUS = 0.5


def _assemble(probs_row: np.ndarray, r_row: np.ndarray, pairs_slice: np.ndarray) -> np.ndarray:
    n, A = probs_row.shape
    size = n * A
    K = (pairs_slice * probs_row[None, :, None, :]).transpose(0, 2, 1, 3).reshape(size, size)
    H = np.diag(r_row.ravel()) - K
    B_hat = np.kron(np.eye(n), np.ones((A, 1)))
    B_check = B_hat.T * probs_row.ravel()[None, :]
    return np.block([[H, B_hat], [B_check, np.zeros((n, n))]])


def coefficient_matrix(
    probs_row: np.ndarray, r_row: np.ndarray, pairs_slice: np.ndarray
) -> tuple[np.ndarray, float]:
    """Assemble the coefficient matrix of one state.

    Args:
        probs_row: Policy at the state, [player][action]
        r_row: Regret at the state, [player][action], positive
        pairs_slice: devU_pairs at the state, [i][j][a][a']

    Returns:
        (C, rcond) where rcond is the LAPACK 1-norm reciprocal condition estimate
    """
    C = _assemble(probs_row, r_row, pairs_slice)
    _, rcond = factorize(C)
    return C, rcond


def factorize(C: np.ndarray) -> tuple[tuple[np.ndarray, np.ndarray], float]:
    """LU factorization of C with a reciprocal condition estimate (0 when singular)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(C, check_finite=False)
    if not np.all(np.isfinite(lu)) or np.any(np.diag(lu) == 0.0):
        return (lu, piv), 0.0
    gecon = get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, np.linalg.norm(C, 1), norm="1")
    if info != 0:
        return (lu, piv), 0.0
    return (lu, piv), float(rcond)


def _state_factorizations(probs: np.ndarray, r: np.ndarray, dev_pairs: np.ndarray):
    for s in range(probs.shape[0]):
        yield factorize(_assemble(probs[s], r[s], dev_pairs[s]))


def bundle_differential(
    policy: Policy | np.ndarray,
    dq: DualQuantities,
    dev_pairs: np.ndarray,
    singular_rcond: float = 1e-10,
) -> BundleDifferential:
    """Solve C [X; Y] = [Diag(r); 0] in every state.

    X is (dpi/pi) / (dmu/mu) and Y is mu dv/dmu. States whose reciprocal condition
    estimate falls below ``singular_rcond`` are flagged singular and left as NaN.
    """
    probs = as_probs(policy)
    S, n, A = probs.shape
    size = n * A
    X = np.full((S, size, size), np.nan)
    Y = np.full((S, n, size), np.nan)
    cond = np.full(S, np.inf)
    singular = np.ones(S, dtype=bool)

    for s, (factors, rcond) in enumerate(_state_factorizations(probs, dq.r, dev_pairs)):
        if rcond > 0.0:
            cond[s] = 1.0 / rcond
        if rcond < singular_rcond:
            logger.debug("state %d coefficient matrix singular (rcond=%.3e)", s, rcond)
            continue
        rhs = np.vstack([np.diag(dq.r[s].ravel()), np.zeros((n, size))])
        solution = lu_solve(factors, rhs, check_finite=False)
        X[s] = solution[:size]
        Y[s] = solution[size:]
        singular[s] = False

    return BundleDifferential(
        dlogpi_dlogmu=X, dv_dlogmu=Y, condition_estimate=cond, singular=singular
    )


def predicted_policy_move(diff: BundleDifferential, dlogmu: np.ndarray) -> np.ndarray:
    """First-order change of log pi for a change of log mu, [state][player][action]."""
    S, n, A = dlogmu.shape
    return np.einsum("spq,sq->sp", diff.dlogpi_dlogmu, dlogmu.reshape(S, n * A)).reshape(S, n, A)


def bias_correction_direction(
    policy: Policy | np.ndarray,
    mu: np.ndarray,
    dq: DualQuantities,
    dev_pairs: np.ndarray,
    singular_rcond: float = 1e-10,
) -> np.ndarray:
    """Logit direction x that drives pi * r toward mu to first order.

    Solves C [x; dv] = [r_hat - r; 0] per state. Where C is singular the direction falls back
    to the diagonally scaled gradient -pg / (2 pi r).

    Returns:
        Tensor [state][player][action], each row orthogonal to pi
    """
    probs = as_probs(policy)
    S, n, A = probs.shape
    size = n * A
    x = np.empty_like(probs)
    pg = None

    for s, (factors, rcond) in enumerate(_state_factorizations(probs, dq.r, dev_pairs)):
        if rcond >= singular_rcond:
            rhs = np.concatenate([((mu[s] - probs[s] * dq.r[s]) / probs[s]).ravel(), np.zeros(n)])
            x[s] = lu_solve(factors, rhs, check_finite=False)[:size].reshape(n, A)
            continue
        if pg is None:
            pg = projected_gradient(probs, dq, dev_pairs)
        x[s] = -pg[s] / (2.0 * probs[s] * dq.r[s])
    return x


def clip_to_trust_region(step: np.ndarray, radius: float = TRUST_RADIUS) -> np.ndarray:
    """Scale ``step`` down so that its infinity norm is at most ``radius``."""
    size = float(np.max(np.abs(step))) if step.size else 0.0
    if size > radius:
        return step * (radius / size)
    return step


def project_to_bundle(
    game: DynamicGame,
    logits: np.ndarray,
    mu: BarrierParameter | np.ndarray,
    stage_u: np.ndarray,
    tol: float = 1e-13,
    max_iterations: int = 100,
    singular_rcond: float = 1e-10,
) -> Policy:
    """Newton iterations on the bundle equations with the stage utility held fixed.

    Returns:
        The policy (with logits) once ||pi - pi_hat||_inf < tol or the iteration cap is hit
    """
    mu = mu.mu if isinstance(mu, BarrierParameter) else np.asarray(mu, dtype=float)
    logits = np.array(logits, dtype=float)
    for _ in range(max_iterations):
        probs = softmax(logits, axis=-1)
        dev = deviation_utility(game, probs, stage_u)
        dq = dual_from_deviation(probs, mu, dev)
        if np.max(np.abs(probs - dq.pi_hat)) < tol:
            break
        pairs = deviation_utility_pairs(game, probs, stage_u)
        step = bias_correction_direction(probs, mu, dq, pairs, singular_rcond)
        logits += clip_to_trust_region(step)
    return Policy.from_logits(logits)
