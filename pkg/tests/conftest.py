"""Shared fixtures."""

import numpy as np
import pytest

from bundle_solve.game.generator import generate_random_game
from tests import games


@pytest.fixture
def matching_pennies():
    return games.matching_pennies()


@pytest.fixture
def rock_paper_scissors():
    return games.rock_paper_scissors()


@pytest.fixture
def coordination():
    return games.coordination()


@pytest.fixture
def prisoners_dilemma():
    return games.prisoners_dilemma()


@pytest.fixture
def cycle_mdp():
    return games.cycle_mdp()


@pytest.fixture
def random_game():
    """Factory: random_game(players, states, actions, gamma, seed)."""

    def make(n_players=2, n_states=2, n_actions=2, gamma=0.5, seed=0):
        return generate_random_game(n_players, n_states, n_actions, gamma, seed)

    return make


@pytest.fixture
def random_policy():
    """Factory: interior Dirichlet policy for a game."""

    def make(game, seed=0):
        rng = np.random.default_rng(seed)
        return rng.dirichlet(np.ones(game.n_actions), size=(game.n_states, game.n_players))

    return make
