import numpy as np
import pytest

from bundle_solve.dp import (
    apply_D,
    apply_Dhat,
    cone_distances,
    dp_step,
    in_best_response_cone,
    in_policy_cone,
    min_shift_to_best_response_cone,
    policy_value,
    regret_objective,
)
from bundle_solve.errors import DomainError
from bundle_solve.game.contractions import stage_utility
from bundle_solve.models.game import DynamicGame
from bundle_solve.oracles.brute_force import brute_force_contractions
from tests.games import pure_policy


@pytest.fixture
def game(random_game):
    return random_game(n_players=2, n_states=3, n_actions=2, gamma=0.5, seed=21)


@pytest.fixture
def probs(game, random_policy):
    return random_policy(game, seed=8)


class TestOperators:
    def test_policy_value_is_fixed_point(self, game, probs):
        V = policy_value(game, probs)
        np.testing.assert_allclose(apply_D(game, probs, V).values, V.values, atol=1e-10)

    def test_zero_discount_ignores_values(self, random_game, random_policy):
        game = random_game(gamma=0.0)
        probs = random_policy(game)
        low = apply_D(game, probs, np.zeros((game.n_states, game.n_players)))
        high = apply_D(game, probs, np.full((game.n_states, game.n_players), 100.0))
        np.testing.assert_array_equal(low.values, high.values)

    def test_apply_D_matches_brute_force(self, random_game, random_policy):
        game = random_game(n_players=2, n_states=2, n_actions=2, seed=5)
        probs = random_policy(game, seed=5)
        V = np.random.default_rng(0).normal(size=(2, 2))
        stage_u = stage_utility(game, V)
        joint, _, _ = brute_force_contractions(game, probs, stage_u)
        expected = np.einsum("sj,sji->si", joint, stage_u)
        np.testing.assert_allclose(apply_D(game, probs, V).values, expected, atol=1e-12)

    def test_single_action_Dhat_equals_D(self, random_game):
        game = random_game(n_players=2, n_states=2, n_actions=1)
        probs = np.ones((2, 2, 1))
        V = np.ones((2, 2))
        expected = apply_D(game, probs, V).values
        np.testing.assert_allclose(apply_Dhat(game, probs, V).values, expected)

    def test_matching_pennies_uniform_is_zero(self, matching_pennies):
        probs = np.full((1, 2, 2), 0.5)
        V = np.zeros((1, 2))
        np.testing.assert_allclose(apply_D(matching_pennies, probs, V).values, 0.0, atol=1e-15)
        np.testing.assert_allclose(apply_Dhat(matching_pennies, probs, V).values, 0.0, atol=1e-15)

    def test_Dhat_dominates_D(self, game, random_policy):
        rng = np.random.default_rng(1)
        for seed in range(20):
            probs = random_policy(game, seed=seed)
            V = rng.normal(size=(game.n_states, game.n_players))
            D = apply_D(game, probs, V).values
            Dhat = apply_Dhat(game, probs, V).values
            assert np.all(Dhat >= D - 1e-12)


class TestPolicyValue:
    def test_geometric_series(self):
        game = DynamicGame(
            n_players=1, n_states=1, n_actions=1, gamma=0.5,
            utility=[[[1.0]]], transition=[[[1.0]]],
        )
        np.testing.assert_allclose(policy_value(game, np.ones((1, 1, 1))).values, [[2.0]])

    def test_two_state_cycle(self, cycle_mdp):
        V = policy_value(cycle_mdp, np.ones((2, 1, 1))).values
        np.testing.assert_allclose(V[:, 0], [4 / 3, 2 / 3], atol=1e-12)

    def test_zero_discount_is_expected_payoff(self, prisoners_dilemma):
        probs = pure_policy(prisoners_dilemma, [[0, 1]])
        np.testing.assert_allclose(policy_value(prisoners_dilemma, probs).values, [[0.0, 5.0]])

    def test_residual(self, random_game, random_policy):
        game = random_game(n_players=3, n_states=5, n_actions=2, gamma=0.95, seed=2)
        probs = random_policy(game, seed=2)
        V = policy_value(game, probs).values
        residual = np.max(np.abs(V - apply_D(game, probs, V).values))
        assert residual < 1e-9 * (1 + np.max(np.abs(V)))


class TestCones:
    def test_large_shift_is_in_both_cones(self, game, probs):
        V = policy_value(game, probs).values
        shifted = V + 1.0 / (1.0 - game.gamma) ** 2 + 1.0
        assert in_policy_cone(game, probs, shifted)
        assert in_best_response_cone(game, probs, shifted)

    def test_policy_value_is_policy_cone_apex(self, game, probs):
        assert in_policy_cone(game, probs, policy_value(game, probs))

    def test_best_response_cone_inside_policy_cone(self, game, random_policy):
        rng = np.random.default_rng(3)
        for k in range(200):
            probs = random_policy(game, seed=k)
            V = policy_value(game, probs).values + rng.uniform(-1.0, 3.0, size=(3, 2))
            if in_best_response_cone(game, probs, V):
                assert in_policy_cone(game, probs, V)

    def test_apex_minimality(self, game, probs):
        rng = np.random.default_rng(4)
        V_pi = policy_value(game, probs).values
        found = 0
        for _ in range(500):
            V = V_pi + rng.uniform(-0.1, 1.9, size=V_pi.shape)
            if in_policy_cone(game, probs, V):
                found += 1
                assert np.all(V >= V_pi - 1e-9)
        assert found > 0

    def test_distances_vanish_at_policy_value(self, game, probs):
        distances = cone_distances(game, probs, policy_value(game, probs))
        np.testing.assert_allclose(distances.d, 0.0, atol=1e-10)
        assert np.all(distances.d_hat <= distances.d + 1e-12)

    def test_distances_recomputed(self, game, probs):
        V = np.random.default_rng(5).normal(size=(3, 2))
        distances = cone_distances(game, probs, V)
        expected = (V - apply_D(game, probs, V).values) / (1.0 - game.gamma)
        np.testing.assert_allclose(distances.d, expected, atol=1e-14)

    def test_distances_agree_at_stage_equilibrium(self, matching_pennies):
        probs = np.full((1, 2, 2), 0.5)
        distances = cone_distances(matching_pennies, probs, np.ones((1, 2)))
        np.testing.assert_allclose(distances.d, distances.d_hat, atol=1e-15)

    def test_min_shift_zero_inside_cone(self, game, probs):
        V = policy_value(game, probs).values + 10.0
        np.testing.assert_array_equal(min_shift_to_best_response_cone(game, probs, V), 0.0)

    def test_min_shift_is_translation_equivariant(self, game, probs):
        V_pi = policy_value(game, probs).values
        m = min_shift_to_best_response_cone(game, probs, V_pi)
        assert np.all(m > 0.0)
        tight = V_pi + m
        lowered = min_shift_to_best_response_cone(game, probs, tight - 0.25)
        np.testing.assert_allclose(lowered, 0.25, atol=1e-9)

    def test_min_shift_reaches_cone(self, game, random_policy):
        rng = np.random.default_rng(6)
        for k in range(20):
            probs = random_policy(game, seed=100 + k)
            V = rng.normal(size=(3, 2))
            m = min_shift_to_best_response_cone(game, probs, V)
            assert in_best_response_cone(game, probs, V + m + 1e-9)


class TestDpStep:
    def test_fixed_point_without_shift(self, game, probs):
        V = policy_value(game, probs)
        np.testing.assert_allclose(dp_step(game, probs, V).values, V.values, atol=1e-10)

    def test_shifted_limit(self, game, probs):
        m = np.array([0.3, 1.2])
        V = policy_value(game, probs).values + 10.0
        for _ in range(200):
            V = dp_step(game, probs, V, m).values
        limit = policy_value(game, probs).values + game.gamma * m / (1.0 - game.gamma)
        np.testing.assert_allclose(V, limit, atol=1e-8)

    def test_linear_rate(self, game, probs):
        m = 0.5
        limit = policy_value(game, probs).values + game.gamma * m / (1.0 - game.gamma)
        V = limit + 9.0 + np.random.default_rng(7).uniform(0.0, 1.0, size=limit.shape)
        errors = []
        for _ in range(30):
            V = dp_step(game, probs, V, m).values
            errors.append(np.max(np.abs(V - limit)))
        ratios = np.array(errors[21:]) / np.array(errors[20:-1])
        np.testing.assert_allclose(ratios, game.gamma, atol=0.02)

    def test_monotone_descent_inside_policy_cone(self, game, probs):
        V = policy_value(game, probs).values + 5.0
        for _ in range(30):
            updated = dp_step(game, probs, V).values
            assert np.all(updated <= V + 1e-12)
            assert in_policy_cone(game, probs, updated)
            V = updated

    def test_negative_shift_rejected(self, game, probs):
        with pytest.raises(DomainError):
            dp_step(game, probs, np.zeros((3, 2)), m=-1.0)


class TestRegretObjective:
    def test_zero_at_equilibrium(self, matching_pennies):
        probs = np.full((1, 2, 2), 0.5)
        value, feasible = regret_objective(
            matching_pennies, probs, policy_value(matching_pennies, probs)
        )
        assert value == pytest.approx(0.0, abs=1e-12)
        assert feasible

    def test_infeasible_off_equilibrium(self, prisoners_dilemma):
        probs = np.full((1, 2, 2), 0.5)
        _, feasible = regret_objective(
            prisoners_dilemma, probs, policy_value(prisoners_dilemma, probs)
        )
        assert not feasible

    def test_weights_must_be_positive(self, matching_pennies):
        with pytest.raises(DomainError):
            regret_objective(matching_pennies, np.full((1, 2, 2), 0.5), np.zeros((1, 2)), [0.0])
