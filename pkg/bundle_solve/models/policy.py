"""Policy, value function and barrier parameter models."""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import softmax

from bundle_solve.errors import GameValidationError, ShapeError
from bundle_solve.models.game import DynamicGame

ROW_SUM_TOL = 1e-12


def _check_shape(array: np.ndarray, expected: tuple[int, ...], name: str) -> None:
    if array.shape != expected:
        raise ShapeError(f"{name} has shape {array.shape}, expected {expected}")


@dataclass(eq=False)
class Policy:
    """Per-state, per-player mixed strategies.

    Attributes:
        probs: Tensor [state][player][action] of probabilities
        logits: Optional tensor of the same shape; when present, probs = softmax(logits)
            per (state, player) row and every probability is strictly positive
    """

    probs: np.ndarray
    logits: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if self.logits is not None:
            self.logits = np.asarray(self.logits, dtype=float)

    @classmethod
    def from_logits(cls, logits: np.ndarray) -> "Policy":
        """Build an interior policy from logits (softmax over the action axis)."""
        logits = np.asarray(logits, dtype=float)
        return cls(probs=softmax(logits, axis=-1), logits=logits)

    @classmethod
    def uniform(cls, game: DynamicGame) -> "Policy":
        """Uniform policy over actions in every state, with zero logits."""
        logits = np.zeros((game.n_states, game.n_players, game.n_actions))
        return cls.from_logits(logits)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.probs.shape

    def is_interior(self) -> bool:
        """True when every probability is strictly positive."""
        return bool(np.all(self.probs > 0.0))

    def with_logits(self) -> "Policy":
        """Return an equivalent policy carrying logits (log-probabilities).

        Raises:
            GameValidationError: If some probability is zero
        """
        if self.logits is not None:
            return self
        if not self.is_interior():
            raise GameValidationError("policy is on the simplex boundary; logits undefined")
        return Policy(probs=self.probs.copy(), logits=np.log(self.probs))

    def validate_for(self, game: DynamicGame) -> None:
        """Check dimensions and simplex membership against a game.

        Raises:
            ShapeError: If the tensor shape does not match the game
            GameValidationError: If a row is negative, non-finite or does not sum to 1
        """
        _check_shape(self.probs, (game.n_states, game.n_players, game.n_actions), "policy")
        if not np.all(np.isfinite(self.probs)):
            s, i, a = np.argwhere(~np.isfinite(self.probs))[0]
            raise GameValidationError(f"probs[{s}][{i}][{a}] is not finite")
        negative = np.argwhere(self.probs < 0.0)
        if negative.size:
            s, i, a = negative[0]
            raise GameValidationError(f"probs[{s}][{i}][{a}] = {self.probs[s, i, a]} is negative")
        sums = self.probs.sum(axis=2)
        bad = np.argwhere(np.abs(sums - 1.0) > ROW_SUM_TOL)
        if bad.size:
            s, i = bad[0]
            raise GameValidationError(f"probs[{s}][{i}] sums to {sums[s, i]!r}, expected 1")
        if self.logits is not None and not self.is_interior():
            raise GameValidationError("policy with logits must be strictly interior")


@dataclass(eq=False)
class ValueFunction:
    """Per-state, per-player values in utility units.

    Attributes:
        values: Tensor [state][player]
    """

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    @classmethod
    def constant(cls, game: DynamicGame, level) -> "ValueFunction":
        """Value function equal to ``level`` (scalar or per-player) in every state."""
        level = np.broadcast_to(np.asarray(level, dtype=float), (game.n_players,))
        return cls(np.tile(level, (game.n_states, 1)))


@dataclass(eq=False)
class BarrierParameter:
    """Per-state, per-player, per-action barrier vector.

    Attributes:
        mu: Tensor [state][player][action], elementwise >= 0
    """

    mu: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)

    def norm(self) -> float:
        """Infinity norm of mu."""
        return float(np.max(np.abs(self.mu))) if self.mu.size else 0.0
