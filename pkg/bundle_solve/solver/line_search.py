"""Two-level line search on the equilibrium bundle.

The inner loop keeps the iterate on the bundle for a fixed barrier parameter while a
shifted DP iteration tracks the value function. The outer loop shrinks the barrier toward
the canonical section and moves the policy along the bundle differential.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import softmax

from bundle_solve.bundle.differential import (
    bias_correction_direction,
    bundle_differential,
    clip_to_trust_region,
    predicted_policy_move,
)
from bundle_solve.bundle.dual import dual_from_deviation, projected_gradient, unbiased_objective
from bundle_solve.bundle.section import (
    canonical_descent_step,
    initial_barrier,
    section_from_deviation,
)
from bundle_solve.dp.operators import policy_value
from bundle_solve.errors import DomainError
from bundle_solve.game.contractions import (
    deviation_utility,
    deviation_utility_pairs,
    stage_utility,
)
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import Policy, ValueFunction
from bundle_solve.models.quantities import DualQuantities
from bundle_solve.models.result import SolveResult, SolverState, SolveStatus, TraceRecord
from bundle_solve.solver.config import SolveConfig

logger = logging.getLogger(__name__)

MAX_ESCALATIONS = 8
MIN_ETA_SCALE = 0.25
NOISE_FACTOR = 16.0
ZERO_RESIDUAL = 1e-14


@dataclass(eq=False)
class _Point:
    probs: np.ndarray
    stage_u: np.ndarray
    dev: np.ndarray
    dual: DualQuantities
    dV: np.ndarray

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.dual.v)) and np.all(np.isfinite(self.dV)))


def utility_scale(game: DynamicGame) -> float:
    """||u||_inf / (1 - gamma), or 1 for an all-zero utility tensor."""
    scale = game.utility_scale() / (1.0 - game.gamma)
    return scale if scale > 0.0 else 1.0


def residual_angles(dV: np.ndarray, small: float = ZERO_RESIDUAL) -> np.ndarray:
    """Unsigned angle between each player's DP residual column and the all-ones vector.

    Columns with infinity norm at most ``small`` have angle 0.
    """
    n_states = dV.shape[0]
    mean = dV.mean(axis=0)
    perpendicular = np.linalg.norm(dV - mean, axis=0)
    parallel = np.abs(mean) * np.sqrt(n_states)
    angles = np.arctan2(perpendicular, parallel)
    return np.where(np.max(np.abs(dV), axis=0) <= small, 0.0, angles)


def _evaluate(game: DynamicGame, state: SolverState) -> _Point:
    probs = softmax(state.logits, axis=-1)
    stage_u = stage_utility(game, state.V + state.m)
    dev = deviation_utility(game, probs, stage_u)
    dual = dual_from_deviation(probs, state.mu, dev)
    # D_pi(V + m 1) = v - sum_a pi r because sum_a pi = 1
    dV = dual.v - np.sum(probs * dual.r, axis=-1) - state.V
    return _Point(probs=probs, stage_u=stage_u, dev=dev, dual=dual, dV=dV)


def _section_norm(game: DynamicGame, probs: np.ndarray) -> tuple[ValueFunction, float]:
    V = policy_value(game, probs)
    dev = deviation_utility(game, probs, stage_utility(game, V))
    return V, float(np.max(section_from_deviation(probs, dev)))


def _record(
    state: SolverState, point: _Point, inner_index: int, canosec_norm: float, angle: float
) -> TraceRecord:
    record = TraceRecord(
        outer_index=state.outer_index,
        inner_index=inner_index,
        bias_norm=float(np.max(np.abs(point.probs - point.dual.pi_hat))),
        objective=unbiased_objective(point.probs, point.dual),
        angle=angle,
        canosec_norm=canosec_norm,
        mu_norm=float(np.max(state.mu)),
    )
    state.trace.append(record)
    return record


def initial_state(
    game: DynamicGame, cfg: SolveConfig, initial_policy: Policy | None = None
) -> SolverState:
    """Starting point of the line search.

    The policy is uniform unless given. V starts at m 1 with m = m_factor ||u|| / (1 - gamma),
    which lies in the best-response cone of every policy when m_factor >= 1, and
    mu = mu_prime_factor ||U||_inf pi with U the stage utility at V + m 1.

    Raises:
        DomainError: If the initial policy is not strictly interior
        ShapeError: If the initial policy does not match the game
    """
    if initial_policy is None:
        policy = Policy.uniform(game)
    else:
        initial_policy.validate_for(game)
        if not initial_policy.is_interior():
            raise DomainError("initial policy must be strictly interior")
        policy = initial_policy.with_logits()

    scale = utility_scale(game)
    m = np.full(game.n_players, cfg.m_factor * game.utility_scale() / (1.0 - game.gamma))
    V = ValueFunction.constant(game, m).values
    stage_norm = float(np.max(np.abs(stage_utility(game, V + m))))
    mu_prime = cfg.mu_prime_factor * (stage_norm if stage_norm > 0.0 else 1.0)
    mu = initial_barrier(policy, mu_prime).mu
    return SolverState(logits=np.array(policy.logits), mu=mu, V=V, m=m, scale=scale)


def _inner_direction(
    game: DynamicGame, state: SolverState, point: _Point, cfg: SolveConfig
) -> np.ndarray:
    pairs = deviation_utility_pairs(game, point.probs, point.stage_u)
    if cfg.inner_step == "gradient":
        return -cfg.step_size * projected_gradient(point.probs, point.dual, pairs)
    direction = bias_correction_direction(
        point.probs, state.mu, point.dual, pairs, cfg.singular_rcond
    )
    return cfg.newton_damping * direction


def _bias_settled(point: _Point, tol: float) -> bool:
    """||pi - pi_hat|| below tol, widened per entry by the rounding floor of pi_hat.

    pi_hat = mu / r inherits the absolute rounding error of the deviation utilities, which
    grows with the stage utility while r shrinks with mu.
    """
    noise = NOISE_FACTOR * np.finfo(float).eps * float(np.max(np.abs(point.stage_u)))
    floor = point.dual.pi_hat * noise / point.dual.r
    return bool(np.all(np.abs(point.probs - point.dual.pi_hat) < tol + floor))


def inner_converge(
    game: DynamicGame, state: SolverState, cfg: SolveConfig, max_steps: int | None = None
) -> SolverState:
    """Drive the iterate onto the bundle for the current barrier parameter.

    Each step interleaves one logit update with one shifted DP update V <- D_pi(V + m 1).
    The logit update is a damped Gauss-Newton step on the coefficient matrix or, with
    ``inner_step="gradient"``, logits - step_size * pg. Exits when the primal-dual bias is
    below tolerance and the DP residual is parallel to 1 (or negligible) for every player.
    Sets ``state.status`` to MAX_ITERATIONS when ``max_steps`` (default ``max_inner``) is hit
    and to NUMERICAL_FAILURE on non-finite values.
    """
    tol = cfg.inner_tol_bias
    limit = cfg.max_inner if max_steps is None else max_steps
    state.inner_steps_current = 0

    for k in range(limit):
        point = _evaluate(game, state)
        if not point.is_finite():
            logger.warning("non-finite dual values at outer step %d", state.outer_index)
            state.status = SolveStatus.NUMERICAL_FAILURE
            return state

        angles = residual_angles(point.dV, tol * state.scale)
        canosec = section_from_deviation(point.probs, point.dev)
        _record(state, point, k, float(np.max(canosec)), float(np.max(angles)))
        state.inner_steps_total += 1
        state.inner_steps_current += 1
        state.dual = point.dual

        r_gap = float(np.max(np.abs(point.dual.r - point.dual.r_hat)))
        parallel = game.n_states == 1 or bool(np.all(angles < cfg.inner_tol_angle))
        if _bias_settled(point, tol) and r_gap < tol * state.scale and parallel:
            return state

        step = _inner_direction(game, state, point, cfg)
        state.logits = state.logits + clip_to_trust_region(step)
        state.V = state.V + point.dV

    logger.info("inner loop hit %d steps at outer step %d", limit, state.outer_index)
    state.status = SolveStatus.MAX_ITERATIONS
    return state


def outer_step(game: DynamicGame, state: SolverState, cfg: SolveConfig) -> SolverState:
    """Hop to a neighbouring fiber.

    Away from singular points the barrier shrinks by the factor 1 - eta * eta_scale and the
    logits move by the bundle differential applied to the relative barrier change, clipped to
    the trust radius. At a singular point, or when ``state.force_escape`` is set after
    repeated stalls, the barrier instead slides along the fiber by beta pi with beta doubling
    on every consecutive escape; the policy stays on the bundle. After MAX_ESCALATIONS
    consecutive escapes the run ends with NUMERICAL_FAILURE.
    """
    point = _evaluate(game, state)
    pairs = deviation_utility_pairs(game, point.probs, point.stage_u)
    diff = bundle_differential(point.probs, point.dual, pairs, cfg.singular_rcond)

    if diff.any_singular or state.force_escape:
        if state.escalations >= MAX_ESCALATIONS:
            logger.warning("fiber escape failed after %d escalations", state.escalations)
            state.status = SolveStatus.NUMERICAL_FAILURE
            return state
        escaping = np.ones_like(diff.singular) if state.force_escape else diff.singular
        beta = 0.5 * 2.0**state.escalations * state.mu.mean(axis=-1)
        beta = np.where(escaping[:, None], beta, 0.0)
        state.mu = canonical_descent_step(state.mu, point.probs, eta=0.0, beta=beta).mu
        state.escalations += 1
        state.eta_scale = 1.0
        state.force_escape = False
        state.regular_step = False
        logger.info(
            "fiber escape at states %s, escalation %d",
            np.flatnonzero(escaping).tolist(),
            state.escalations,
        )
    else:
        eta = cfg.eta * state.eta_scale
        mu_next = canonical_descent_step(state.mu, point.probs, eta=eta).mu
        dlogmu = (mu_next - state.mu) / state.mu
        state.logits = state.logits + clip_to_trust_region(predicted_policy_move(diff, dlogmu))
        state.mu = mu_next
        state.regular_step = True

    state.m = state.m * cfg.m_decay
    _, canosec_norm = _section_norm(game, point.probs)
    angle = float(np.max(residual_angles(point.dV, cfg.inner_tol_bias * state.scale)))
    _record(state, point, state.inner_steps_current, canosec_norm, angle)
    state.outer_steps_total += 1
    logger.debug(
        "outer %d: canosec=%.3e mu=%.3e inner_steps=%d",
        state.outer_index,
        canosec_norm,
        float(np.max(state.mu)),
        state.inner_steps_current,
    )
    state.outer_index += 1
    return state


@dataclass(frozen=True)
class _Checkpoint:
    """Last settled iterate, restored when the following outer step stalls."""

    logits: np.ndarray
    mu: np.ndarray
    V: np.ndarray
    m: np.ndarray

    @classmethod
    def of(cls, state: SolverState) -> "_Checkpoint":
        return cls(state.logits.copy(), state.mu.copy(), state.V.copy(), state.m.copy())

    def restore(self, state: SolverState) -> None:
        state.logits = self.logits.copy()
        state.mu = self.mu.copy()
        state.V = self.V.copy()
        state.m = self.m.copy()


def _retreat(state: SolverState, checkpoint: _Checkpoint) -> None:
    """Return to the checkpoint and make the next outer step more cautious.

    eta is halved down to MIN_ETA_SCALE; past that the next step escapes along the fiber.
    """
    checkpoint.restore(state)
    state.stalls += 1
    if state.eta_scale > MIN_ETA_SCALE:
        state.eta_scale *= 0.5
    else:
        state.force_escape = True
    logger.info(
        "inner loop stalled after outer step %d; eta scale %.3g%s",
        state.outer_index - 1,
        state.eta_scale,
        ", escaping along the fiber" if state.force_escape else "",
    )


def _settled(state: SolverState) -> None:
    if state.regular_step:
        state.escalations = 0
        state.eta_scale = min(1.0, 2.0 * state.eta_scale)


def solve(
    game: DynamicGame,
    cfg: SolveConfig | None = None,
    initial_policy: Policy | None = None,
) -> tuple[SolveResult, list[TraceRecord]]:
    """Compute an epsilon-perfect equilibrium by line search on the equilibrium bundle.

    Once a first point has settled, an inner loop that needs more than ``inner_patience``
    steps abandons its outer step: the iterate returns to the last settled point and the
    step is retried with half the eta, and after two halvings as a fiber escape.

    Args:
        game: A validated game
        cfg: Solver settings; defaults when omitted
        initial_policy: Strictly interior starting policy; uniform when omitted

    Returns:
        The result and the full diagnostics trace. Identical inputs give bit-identical
        output.
    """
    cfg = cfg or SolveConfig()
    state = initial_state(game, cfg, initial_policy)
    logger.info(
        "solving game players=%d states=%d actions=%d gamma=%.3f eps=%.1e",
        game.n_players,
        game.n_states,
        game.n_actions,
        game.gamma,
        cfg.outer_tol_eps,
    )

    checkpoint: _Checkpoint | None = None
    while True:
        patient = checkpoint is not None and cfg.inner_patience < cfg.max_inner
        limit = cfg.inner_patience if patient else cfg.max_inner
        state = inner_converge(game, state, cfg, max_steps=limit)
        if patient and state.status is SolveStatus.MAX_ITERATIONS:
            state.status = None
            _retreat(state, checkpoint)
        elif state.status is not None:
            break
        else:
            _, eps = _section_norm(game, softmax(state.logits, axis=-1))
            if eps <= cfg.outer_tol_eps:
                state.status = SolveStatus.CONVERGED
                break
            _settled(state)
            checkpoint = _Checkpoint.of(state)
        if state.outer_steps_total >= cfg.max_outer:
            state.status = SolveStatus.MAX_ITERATIONS
            break
        state = outer_step(game, state, cfg)
        if state.status is not None:
            break

    policy = state.policy
    value, eps = _section_norm(game, policy.probs)
    result = SolveResult(
        status=state.status,
        policy=policy,
        value=value,
        eps_achieved=eps,
        inner_steps_total=state.inner_steps_total,
        outer_steps_total=state.outer_steps_total,
    )
    logger.info(
        "finished with status=%s eps=%.3e outer=%d inner=%d stalls=%d",
        result.status.value,
        eps,
        result.outer_steps_total,
        result.inner_steps_total,
        state.stalls,
    )
    return result, state.trace
