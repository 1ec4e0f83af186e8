"""Game representation: contractions, random generation and files."""

from bundle_solve.game.contractions import (
    deviation_utility,
    deviation_utility_pairs,
    joint_policy_prob,
    stage_utility,
)
from bundle_solve.game.files import load_game, load_policy, save_game, save_policy
from bundle_solve.game.generator import generate_random_game

__all__ = [
    "deviation_utility",
    "deviation_utility_pairs",
    "generate_random_game",
    "joint_policy_prob",
    "load_game",
    "load_policy",
    "save_game",
    "save_policy",
    "stage_utility",
]
