import numpy as np
import pytest

from bundle_solve.errors import DomainError
from bundle_solve.models.policy import Policy, ValueFunction
from bundle_solve.models.result import SolveResult, SolveStatus
from bundle_solve.solver import (
    SolveConfig,
    distinct_equilibria,
    nash_gap,
    run_starts,
    scan_policy_space,
    solve_multistart,
    verify_epsilon_equilibrium,
    worst_violation,
)
from tests.games import constant_game, pure_policy


class TestVerify:
    def test_dominant_profile_passes(self, prisoners_dilemma):
        passed, section = verify_epsilon_equilibrium(
            prisoners_dilemma, pure_policy(prisoners_dilemma, [[1, 1]]), 1e-9
        )
        assert passed
        assert section.norm() == 0.0

    def test_matching_pennies_uniform_passes(self, matching_pennies):
        passed, _ = verify_epsilon_equilibrium(matching_pennies, np.full((1, 2, 2), 0.5), 1e-9)
        assert passed

    def test_perturbed_equilibrium_is_localized(self, prisoners_dilemma):
        probs = pure_policy(prisoners_dilemma, [[1, 1]])
        probs[0, 1] = [0.1, 0.9]
        passed, section = verify_epsilon_equilibrium(prisoners_dilemma, probs, 1e-3)
        assert not passed
        index, value = worst_violation(section)
        assert index == (0, 1, 0)
        # cooperating against a defector forgoes 1 - 0
        assert value == pytest.approx(0.1)

    def test_nash_gap_sums_the_section(self, random_game, random_policy):
        game = random_game(n_players=3, n_states=2, n_actions=3, seed=1)
        probs = random_policy(game, seed=1)
        _, section = verify_epsilon_equilibrium(game, probs, 1e-3)
        np.testing.assert_allclose(nash_gap(game, probs), section.mu.sum(axis=-1), atol=1e-10)


class TestScan:
    def test_indifferent_game(self):
        ranked = scan_policy_space(constant_game(3), 50, seed=0)
        assert len(ranked) == 50
        assert all(norm == 0.0 for _, norm in ranked)

    def test_sorted_and_deterministic(self, random_game):
        game = random_game(seed=2)
        first = scan_policy_space(game, 100, seed=3)
        second = scan_policy_space(game, 100, seed=3)
        norms = [norm for _, norm in first]
        assert norms == sorted(norms)
        assert norms == [norm for _, norm in second]

    def test_matching_pennies_minimum_near_uniform(self, matching_pennies):
        ranked = scan_policy_space(matching_pennies, 10_000, seed=0)
        best, _ = ranked[0]
        assert np.max(np.abs(best.probs - 0.5)) < 0.05

    def test_single_sample(self, matching_pennies):
        assert len(scan_policy_space(matching_pennies, 1, seed=0)) == 1

    def test_needs_a_sample(self, matching_pennies):
        with pytest.raises(DomainError):
            scan_policy_space(matching_pennies, 0, seed=0)


def test_multistart_returns_distinct_equilibria(coordination):
    results = solve_multistart(coordination, SolveConfig(), n_samples=200, n_starts=4)
    assert results
    eps = [r.eps_achieved for r in results]
    assert eps == sorted(eps)
    for r in results:
        assert r.converged
        passed, _ = verify_epsilon_equilibrium(coordination, r.policy, 1e-4)
        assert passed
    for a in range(len(results)):
        for b in range(a + 1, len(results)):
            assert np.max(np.abs(results[a].policy.probs - results[b].policy.probs)) >= 1e-3


def _result(probs, eps, status=SolveStatus.CONVERGED):
    probs = np.asarray(probs, dtype=float)
    return SolveResult(
        status=status,
        policy=Policy(probs=probs),
        value=ValueFunction(values=np.zeros((probs.shape[0], probs.shape[1]))),
        eps_achieved=eps,
        inner_steps_total=1,
        outer_steps_total=0,
    )


class TestDistinctEquilibria:
    def test_near_duplicates_keep_the_smaller_eps(self):
        a = _result([[[0.5, 0.5]]], 2e-5)
        b = _result([[[0.5004, 0.4996]]], 1e-5)
        c = _result([[[0.9, 0.1]]], 3e-5)
        kept = distinct_equilibria([a, b, c])
        assert len(kept) == 2
        assert kept[0] is b
        assert kept[1] is c

    def test_unconverged_runs_are_dropped(self):
        stalled = _result([[[0.5, 0.5]]], 1e-2, status=SolveStatus.MAX_ITERATIONS)
        assert distinct_equilibria([stalled]) == []


def test_run_starts_keeps_every_start(coordination):
    runs = run_starts(coordination, SolveConfig(), n_samples=50, n_starts=3)
    assert len(runs) == 3
    for result, trace in runs:
        assert len(trace) == result.inner_steps_total + result.outer_steps_total
