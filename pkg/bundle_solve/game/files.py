"""JSON game and policy files."""

import json
from pathlib import Path

import numpy as np

from bundle_solve.errors import GameValidationError
from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import Policy

GAME_KEYS = ("players", "states", "actions", "gamma", "utility", "transition")


def _read_json(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise GameValidationError(f"{path}: malformed JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise GameValidationError(f"{path}: expected a JSON object at top level")
    return data


def _write_json(data: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f)
        f.write("\n")


def game_to_dict(game: DynamicGame) -> dict:
    return {
        "players": game.n_players,
        "states": game.n_states,
        "actions": game.n_actions,
        "gamma": game.gamma,
        "utility": game.utility.tolist(),
        "transition": game.transition.tolist(),
    }


def game_from_dict(data: dict) -> DynamicGame:
    """Build and validate a game from its JSON object.

    Raises:
        GameValidationError: On missing keys, ragged arrays or violated invariants
    """
    missing = [k for k in GAME_KEYS if k not in data]
    if missing:
        raise GameValidationError(f"game file is missing keys: {', '.join(missing)}")
    for key in ("players", "states", "actions"):
        if not isinstance(data[key], int) or isinstance(data[key], bool):
            raise GameValidationError(f"{key} must be an integer, got {data[key]!r}")
    if not isinstance(data["gamma"], (int, float)) or isinstance(data["gamma"], bool):
        raise GameValidationError(f"gamma must be a number, got {data['gamma']!r}")
    return DynamicGame(
        n_players=data["players"],
        n_states=data["states"],
        n_actions=data["actions"],
        gamma=data["gamma"],
        utility=data["utility"],
        transition=data["transition"],
    )


def load_game(path: Path | str) -> DynamicGame:
    """Load a game file and re-validate every invariant.

    Raises:
        GameValidationError: If the file is malformed or the game is invalid
        OSError: If the file cannot be read
    """
    path = Path(path)
    return game_from_dict(_read_json(path))


def save_game(game: DynamicGame, path: Path | str) -> None:
    """Write a game file. Floats are written with full round-trip precision."""
    _write_json(game_to_dict(game), Path(path))


def load_policy(path: Path | str, game: DynamicGame | None = None) -> Policy:
    """Load a policy file, validating it against ``game`` when given.

    Raises:
        GameValidationError: If the file is malformed or the policy leaves the simplex
        ShapeError: If the policy does not match the game dimensions
    """
    path = Path(path)
    data = _read_json(path)
    if "probs" not in data:
        raise GameValidationError(f"{path}: policy file is missing key 'probs'")
    try:
        probs = np.array(data["probs"], dtype=float)
    except (TypeError, ValueError) as e:
        raise GameValidationError(f"{path}: probs is not a numeric array ({e})") from e
    policy = Policy(probs=probs)
    if game is not None:
        policy.validate_for(game)
    return policy


def save_policy(policy: Policy, path: Path | str) -> None:
    _write_json({"probs": policy.probs.tolist()}, Path(path))
