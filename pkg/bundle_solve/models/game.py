"""Dynamic game data model."""

from dataclasses import dataclass, field

import numpy as np

from bundle_solve.errors import GameValidationError

STOCHASTIC_TOL = 1e-12


def _frozen(array, name: str) -> np.ndarray:
    try:
        out = np.array(array, dtype=float, copy=True)
    except (TypeError, ValueError) as e:
        raise GameValidationError(f"{name}: not a numeric array ({e})") from e
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class DynamicGame:
    """A finite discounted stochastic game with a uniform action count.

    Joint actions are flattened row-major with player 0 as the slowest-varying digit,
    so joint index A = sum_k a_k * n_actions ** (n_players - 1 - k).

    Attributes:
        n_players: Number of players
        n_states: Number of states
        n_actions: Actions per player (same in every state)
        gamma: Discount factor in [0, 1)
        utility: Tensor [state][joint_action][player]
        transition: Tensor [state][joint_action][next_state]
    """

    n_players: int
    n_states: int
    n_actions: int
    gamma: float
    utility: np.ndarray = field(repr=False)
    transition: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "utility", _frozen(self.utility, "utility"))
        object.__setattr__(self, "transition", _frozen(self.transition, "transition"))
        object.__setattr__(self, "gamma", float(self.gamma))
        self.validate()

    @property
    def n_joint(self) -> int:
        """Number of joint action profiles."""
        return self.n_actions**self.n_players

    @property
    def action_shape(self) -> tuple[int, ...]:
        """Per-player action axes of an unflattened joint-action tensor."""
        return (self.n_actions,) * self.n_players

    def utility_scale(self) -> float:
        """Infinity norm of the utility tensor."""
        return float(np.max(np.abs(self.utility))) if self.utility.size else 0.0

    def validate(self) -> None:
        """Check counts, discount, tensor shapes and stochasticity.

        Raises:
            GameValidationError: On the first violated invariant, naming its index
        """
        for name in ("n_players", "n_states", "n_actions"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise GameValidationError(f"{name} must be a positive integer, got {value!r}")
        if not (0.0 <= self.gamma < 1.0):
            raise GameValidationError(f"gamma must lie in [0, 1), got {self.gamma}")

        expected_u = (self.n_states, self.n_joint, self.n_players)
        if self.utility.shape != expected_u:
            raise GameValidationError(
                f"utility has shape {self.utility.shape}, expected {expected_u}"
            )
        expected_t = (self.n_states, self.n_joint, self.n_states)
        if self.transition.shape != expected_t:
            raise GameValidationError(
                f"transition has shape {self.transition.shape}, expected {expected_t}"
            )
        if not np.all(np.isfinite(self.utility)):
            s, a, i = np.argwhere(~np.isfinite(self.utility))[0]
            raise GameValidationError(f"utility[{s}][{a}][{i}] is not finite")

        negative = np.argwhere(~(self.transition >= 0.0))
        if negative.size:
            s, a, t = negative[0]
            raise GameValidationError(
                f"transition[{s}][{a}][{t}] = {self.transition[s, a, t]} is negative"
            )
        row_sums = self.transition.sum(axis=2)
        bad = np.argwhere(np.abs(row_sums - 1.0) > STOCHASTIC_TOL)
        if bad.size:
            s, a = bad[0]
            raise GameValidationError(
                f"transition[{s}][{a}] sums to {row_sums[s, a]!r}, expected 1"
            )
