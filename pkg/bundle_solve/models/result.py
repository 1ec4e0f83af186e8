"""Solver state, results, traces and batch summaries."""

from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from bundle_solve.models.policy import Policy, ValueFunction
from bundle_solve.models.quantities import DualQuantities


class SolveStatus(Enum):
    """Terminal status of a solve.

    CONVERGED: canonical section below the configured epsilon
    MAX_ITERATIONS: an inner or outer iteration cap was hit
    NUMERICAL_FAILURE: singular-point escape failed or values became non-finite
    """

    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class TraceRecord:
    """One diagnostics row of the line search.

    Inner steps carry their step index within the current outer iteration; the record
    written after an outer step carries the number of inner steps that preceded it.

    Attributes:
        outer_index: Outer iteration the record belongs to
        inner_index: Inner step index (see above)
        bias_norm: ||pi - pi_hat||_inf
        objective: Unbiased barrier objective
        angle: Max over players of the angle between the DP residual and the line of 1
        canosec_norm: ||canonical section||_inf; inner rows use the current stage utility,
            outer rows the policy value
        mu_norm: ||mu||_inf
    """

    outer_index: int
    inner_index: int
    bias_norm: float
    objective: float
    angle: float
    canosec_norm: float
    mu_norm: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SolveResult:
    """Outcome of a solve.

    Attributes:
        status: Terminal status
        policy: Final policy
        value: Policy value of the final policy
        eps_achieved: ||canonical section||_inf at the final policy
        inner_steps_total: Inner steps over the whole run
        outer_steps_total: Outer steps over the whole run
    """

    status: SolveStatus
    policy: Policy
    value: ValueFunction
    eps_achieved: float
    inner_steps_total: int
    outer_steps_total: int

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "eps_achieved": self.eps_achieved,
            "inner_steps_total": self.inner_steps_total,
            "outer_steps_total": self.outer_steps_total,
            "policy": {"probs": self.policy.probs.tolist()},
            "values": self.value.values.tolist(),
        }


@dataclass(eq=False)
class SolverState:
    """Mutable working state of one line search run.

    Attributes:
        logits: Policy logits [state][player][action]
        mu: Barrier parameter [state][player][action]
        V: Current value iterate [state][player]
        m: Per-player DP shift
        scale: Utility scale used for relative tolerances
        dual: Dual quantities from the most recent inner step
        trace: Diagnostics records emitted so far
        outer_index: Index of the current outer iteration
        inner_steps_total: Inner steps taken so far
        inner_steps_current: Inner steps taken in the current outer iteration
        outer_steps_total: Outer steps taken so far
        escalations: Consecutive fiber escapes without a settled regular step in between
        eta_scale: Multiplier on eta, halved after a stalled outer step and regrown on success
        force_escape: Take the next outer step along the fiber in every state
        regular_step: Whether the most recent outer step shrank the barrier
        stalls: Outer steps abandoned because the inner loop ran out of patience
        status: Set once the run has terminated
    """

    logits: np.ndarray
    mu: np.ndarray
    V: np.ndarray
    m: np.ndarray
    scale: float
    dual: DualQuantities | None = None
    trace: list[TraceRecord] = field(default_factory=list)
    outer_index: int = 0
    inner_steps_total: int = 0
    inner_steps_current: int = 0
    outer_steps_total: int = 0
    escalations: int = 0
    eta_scale: float = 1.0
    force_escape: bool = False
    regular_step: bool = False
    stalls: int = 0
    status: SolveStatus | None = None

    @property
    def policy(self) -> Policy:
        return Policy.from_logits(self.logits)


@dataclass
class BatchRecord:
    """Per-game line of a batch summary."""

    seed: int
    status: str
    outer_steps: int
    inner_steps: int
    eps_achieved: float
    wall_seconds: float


@dataclass
class BatchSummary:
    """Outcome of solving a batch of random games.

    Attributes:
        n_games: Number of games generated
        n_converged: Number that reached status converged
        eps: Epsilon used for every solve
        records: Per-game records ordered by game index
    """

    n_games: int
    n_converged: int
    eps: float
    records: list[BatchRecord] = field(default_factory=list)

    @property
    def all_converged(self) -> bool:
        return self.n_converged == self.n_games

    def to_dict(self) -> dict:
        return {
            "n_games": self.n_games,
            "n_converged": self.n_converged,
            "eps": self.eps,
            "records": [asdict(r) for r in self.records],
        }
