import statistics
import time
import warnings

import numpy as np
import pytest
from scipy.special import softmax

from bundle_solve.bundle.differential import clip_to_trust_region
from bundle_solve.bundle.dual import dual_quantities, projected_gradient
from bundle_solve.errors import DomainError
from bundle_solve.game.contractions import deviation_utility_pairs, stage_utility
from bundle_solve.game.generator import generate_random_game
from bundle_solve.models.policy import Policy
from bundle_solve.models.result import SolveStatus
from bundle_solve.oracles.value_iteration import value_iteration
from bundle_solve.solver import (
    SolveConfig,
    game_seed,
    initial_state,
    inner_converge,
    read_result,
    read_trace,
    run_batch,
    solve,
    verify_epsilon_equilibrium,
    write_result,
    write_trace,
)
from bundle_solve.solver.line_search import residual_angles, utility_scale
from tests.games import pure_policy, static_game


class TestHelpers:
    def test_utility_scale(self, random_game):
        game = random_game(gamma=0.5)
        assert utility_scale(game) == pytest.approx(2.0 * np.max(np.abs(game.utility)))

    def test_utility_scale_of_zero_game(self):
        assert utility_scale(static_game(np.zeros((2, 2)), np.zeros((2, 2)))) == 1.0

    def test_residual_angles(self):
        dV = np.array([[1.0, 1.0, 0.0], [1.0, -1.0, 0.0]])
        angles = residual_angles(dV)
        assert angles[0] == pytest.approx(0.0)
        assert angles[1] == pytest.approx(np.pi / 2)
        assert angles[2] == 0.0

    def test_small_residuals_count_as_parallel(self):
        dV = np.array([[1e-9], [-1e-9]])
        assert residual_angles(dV, small=1e-8)[0] == 0.0


class TestInitialState:
    def test_uniform_start(self, random_game):
        game = random_game(gamma=0.5)
        cfg = SolveConfig()
        state = initial_state(game, cfg)
        m = game.utility_scale() / (1.0 - game.gamma)
        np.testing.assert_allclose(state.V, m)
        np.testing.assert_allclose(state.m, m)
        np.testing.assert_allclose(state.policy.probs, 0.5)
        # mu is a constant multiple of the uniform policy
        np.testing.assert_allclose(state.mu, state.mu.flat[0])

    def test_given_start(self, random_game):
        game = random_game()
        probs = np.full((2, 2, 2), 0.5)
        probs[:, :, 0] = 0.2
        probs[:, :, 1] = 0.8
        state = initial_state(game, SolveConfig(), Policy(probs=probs))
        np.testing.assert_allclose(state.policy.probs, probs)

    def test_boundary_start_rejected(self, prisoners_dilemma):
        start = Policy(pure_policy(prisoners_dilemma, [[1, 1]]))
        with pytest.raises(DomainError):
            solve(prisoners_dilemma, initial_policy=start)


class TestInnerLoop:
    def test_already_on_bundle_exits_at_once(self, matching_pennies):
        cfg = SolveConfig()
        state = inner_converge(matching_pennies, initial_state(matching_pennies, cfg), cfg)
        assert state.status is None
        assert state.inner_steps_current <= 2

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_converges_from_initial_barrier(self, seed):
        game = generate_random_game(2, 2, 2, 0.5, seed)
        cfg = SolveConfig(mu_prime_factor=1e4, max_inner=5000)
        state = inner_converge(game, initial_state(game, cfg), cfg)
        assert state.status is None
        assert state.inner_steps_current <= 200
        assert state.trace[-1].bias_norm < 1e-8

    def test_gradient_step_follows_projected_gradient(self):
        game = generate_random_game(2, 2, 2, 0.5, seed=3)
        cfg = SolveConfig(inner_step="gradient", max_inner=1)
        state = initial_state(game, cfg)
        rng = np.random.default_rng(3)
        state.logits = state.logits + rng.normal(scale=0.3, size=state.logits.shape)
        logits = state.logits.copy()

        probs = softmax(logits, axis=-1)
        stage_u = stage_utility(game, state.V + state.m)
        dq = dual_quantities(game, probs, state.mu, stage_u)
        pg = projected_gradient(probs, dq, deviation_utility_pairs(game, probs, stage_u))

        state = inner_converge(game, state, cfg)
        assert state.status is SolveStatus.MAX_ITERATIONS
        expected = clip_to_trust_region(-cfg.step_size * pg)
        np.testing.assert_allclose(state.logits - logits, expected, atol=1e-12)

    def test_step_limit_overrides_max_inner(self):
        game = generate_random_game(2, 2, 2, 0.5, seed=3)
        cfg = SolveConfig()
        state = initial_state(game, cfg)
        state.logits[..., 0] = -0.3
        state.logits[..., 1] = 0.3
        state = inner_converge(game, state, cfg, max_steps=2)
        assert state.status is SolveStatus.MAX_ITERATIONS
        assert state.inner_steps_current == 2


def _outer_records(trace):
    """Record of each outer step: the last record of every outer index but the final one."""
    last = {}
    for record in trace:
        last[record.outer_index] = record
    return [last[k] for k in sorted(last)][:-1]


def _assert_sections_trend_down(trace):
    sections = [record.canosec_norm for record in _outer_records(trace)]
    for before, after in zip(sections, sections[1:]):
        assert after <= 1.5 * before


class TestSolve:
    def test_matching_pennies(self, matching_pennies):
        result, _ = solve(matching_pennies)
        assert result.converged
        np.testing.assert_allclose(result.policy.probs, 0.5, atol=1e-3)
        assert result.eps_achieved < 1e-6

    def test_rock_paper_scissors(self, rock_paper_scissors):
        result, _ = solve(rock_paper_scissors)
        assert result.converged
        np.testing.assert_allclose(result.policy.probs, 1 / 3, atol=1e-3)
        assert result.eps_achieved < 1e-6

    def test_gradient_inner_step(self, matching_pennies):
        result, trace = solve(matching_pennies, SolveConfig(inner_step="gradient"))
        assert result.converged
        assert len(trace) == result.inner_steps_total + result.outer_steps_total

    def test_prisoners_dilemma_reaches_dominant_profile(self, prisoners_dilemma):
        result, trace = solve(prisoners_dilemma)
        assert result.converged
        assert np.all(result.policy.probs[:, :, 1] > 0.999)
        assert result.outer_steps_total > 0
        assert trace[-1].canosec_norm < trace[0].canosec_norm

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_random_dynamic_games(self, seed):
        game = generate_random_game(2, 2, 2, 0.5, seed)
        cfg = SolveConfig(outer_tol_eps=1e-3)
        result, _ = solve(game, cfg)
        assert result.status is SolveStatus.CONVERGED
        passed, _ = verify_epsilon_equilibrium(game, result.policy, cfg.outer_tol_eps)
        assert passed

    def test_single_player_matches_value_iteration(self):
        game = generate_random_game(1, 3, 3, 0.5, seed=4)
        result, _ = solve(game, SolveConfig(outer_tol_eps=1e-8))
        assert result.converged
        V_star, _ = value_iteration(game, tol=1e-12)
        np.testing.assert_allclose(result.value.values, V_star.values, atol=1e-5)

    def test_deterministic(self):
        game = generate_random_game(2, 2, 2, 0.5, seed=9)
        cfg = SolveConfig(outer_tol_eps=1e-3)
        first, first_trace = solve(game, cfg)
        second, second_trace = solve(game, cfg)
        np.testing.assert_array_equal(first.policy.probs, second.policy.probs)
        assert first.eps_achieved == second.eps_achieved
        assert [r.to_dict() for r in first_trace] == [r.to_dict() for r in second_trace]

    def test_trace_length(self):
        game = generate_random_game(2, 2, 2, 0.5, seed=10)
        result, trace = solve(game, SolveConfig(outer_tol_eps=1e-3))
        assert len(trace) == result.inner_steps_total + result.outer_steps_total
        assert sum(1 for r in trace if r.outer_index == 0) >= 1

    def test_outer_cap(self):
        game = generate_random_game(2, 2, 2, 0.5, seed=11)
        result, _ = solve(game, SolveConfig(max_outer=1))
        assert result.status is SolveStatus.MAX_ITERATIONS
        assert result.outer_steps_total == 1

    def test_inner_cap(self):
        game = generate_random_game(2, 2, 2, 0.5, seed=12)
        result, trace = solve(game, SolveConfig(max_inner=1))
        assert result.status is SolveStatus.MAX_ITERATIONS
        assert len(trace) == 1

    def test_tolerance_is_inclusive(self):
        game = generate_random_game(2, 2, 2, 0.5, seed=5)
        loose, _ = solve(game, SolveConfig(outer_tol_eps=10.0))
        assert loose.converged
        assert loose.outer_steps_total == 0
        exact, _ = solve(game, SolveConfig(outer_tol_eps=loose.eps_achieved))
        assert exact.converged
        assert exact.outer_steps_total == 0

    def test_prisoners_dilemma_sections_trend_down(self, prisoners_dilemma):
        result, trace = solve(prisoners_dilemma)
        assert result.converged
        _assert_sections_trend_down(trace)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_random_game_sections_trend_down(self, seed):
        game = generate_random_game(2, 2, 2, 0.5, seed)
        result, trace = solve(game, SolveConfig(outer_tol_eps=1e-3))
        assert result.converged
        _assert_sections_trend_down(trace)

    def test_stalled_steps_return_to_the_settled_point(self):
        game = generate_random_game(2, 2, 2, 0.5, seed=0)
        cfg = SolveConfig(mu_prime_factor=10.0, inner_patience=1, max_outer=4)
        settled = inner_converge(game, initial_state(game, cfg), cfg)
        result, trace = solve(game, cfg)

        # three regular steps with shrinking eta, then one fiber escape
        assert result.status is SolveStatus.MAX_ITERATIONS
        assert result.outer_steps_total == 4
        assert len(trace) == result.inner_steps_total + result.outer_steps_total
        outer = _outer_records(trace)
        assert len({record.canosec_norm for record in outer}) == 1
        assert outer[-1].mu_norm > trace[0].mu_norm
        np.testing.assert_array_equal(result.policy.probs, softmax(settled.logits, axis=-1))

    def test_five_state_mdp_at_high_discount(self):
        game = generate_random_game(1, 5, 3, 0.9, seed=0)
        result, _ = solve(game, SolveConfig(outer_tol_eps=1e-7))
        assert result.converged
        V_star, greedy = value_iteration(game, tol=1e-12)
        np.testing.assert_allclose(result.value.values, V_star.values, atol=1e-5)
        np.testing.assert_array_equal(
            result.policy.probs.argmax(axis=-1), greedy.probs.argmax(axis=-1)
        )


class TestRecords:
    def test_trace_file(self, tmp_path, matching_pennies):
        _, trace = solve(matching_pennies)
        write_trace(trace, tmp_path / "t.jsonl")
        lines = (tmp_path / "t.jsonl").read_text().splitlines()
        assert len(lines) == len(trace)
        assert [r.to_dict() for r in read_trace(tmp_path / "t.jsonl")] == [
            r.to_dict() for r in trace
        ]

    def test_result_file(self, tmp_path, matching_pennies):
        result, _ = solve(matching_pennies)
        write_result(result, tmp_path / "r.json")
        data = read_result(tmp_path / "r.json")
        assert data["status"] == "converged"
        np.testing.assert_allclose(data["policy"]["probs"], result.policy.probs)
        assert data["inner_steps_total"] == result.inner_steps_total


class TestBatch:
    def test_seed_derivation(self):
        assert game_seed(0, 0) == 0
        assert game_seed(5, 1) == 5 ^ 0x9E3779B9
        assert len({game_seed(3, i) for i in range(100)}) == 100

    def test_empty_batch(self):
        summary = run_batch(0, (2, 2, 2, 0.5), SolveConfig())
        assert summary.n_games == 0
        assert summary.records == []
        assert summary.all_converged

    def test_jobs_do_not_change_outcomes(self, tmp_path):
        cfg = SolveConfig(outer_tol_eps=1e-3)
        inline = run_batch(3, (2, 1, 2, 0.0), cfg, base_seed=1, jobs=1)
        pooled = run_batch(3, (2, 1, 2, 0.0), cfg, base_seed=1, jobs=2, trace_dir=tmp_path)

        def strip(summary):
            return [
                (r.seed, r.status, r.outer_steps, r.inner_steps, r.eps_achieved)
                for r in summary.records
            ]

        assert strip(inline) == strip(pooled)
        assert sorted(p.name for p in tmp_path.iterdir()) == [
            "game_00000.jsonl", "game_00001.jsonl", "game_00002.jsonl"
        ]


@pytest.mark.slow
def test_random_three_player_games_converge():
    cfg = SolveConfig(outer_tol_eps=1e-3)
    summary = run_batch(100, (3, 3, 3, 0.5), cfg, base_seed=7)
    assert summary.all_converged
    assert all(record.wall_seconds < 60.0 for record in summary.records)


@pytest.mark.slow
def test_three_player_game_that_needs_backtracking():
    game = generate_random_game(3, 3, 3, 0.5, seed=1003)
    cfg = SolveConfig(outer_tol_eps=1e-3)
    started = time.perf_counter()
    result, trace = solve(game, cfg)
    elapsed = time.perf_counter() - started
    assert result.converged
    assert elapsed < 60.0
    assert len(trace) == result.inner_steps_total + result.outer_steps_total
    passed, _ = verify_epsilon_equilibrium(game, result.policy, cfg.outer_tol_eps)
    assert passed


@pytest.mark.slow
def test_random_mdps_match_value_iteration():
    cfg = SolveConfig(outer_tol_eps=1e-7)
    started = time.perf_counter()
    for seed in range(50):
        game = generate_random_game(1, 5, 3, 0.9, seed)
        result, _ = solve(game, cfg)
        assert result.converged, f"seed {seed}: {result.status.value} eps={result.eps_achieved}"
        V_star, greedy = value_iteration(game, tol=1e-12)
        np.testing.assert_allclose(result.value.values, V_star.values, atol=1e-5)
        np.testing.assert_array_equal(
            result.policy.probs.argmax(axis=-1), greedy.probs.argmax(axis=-1)
        )
    assert time.perf_counter() - started < 60.0


@pytest.mark.slow
def test_solve_time_trend(record_property):
    """Median solve time over growing sizes; reported, never failing."""
    cfg = SolveConfig(outer_tol_eps=1e-3)
    medians = []
    for shape in ((2, 2, 2), (3, 3, 3), (4, 3, 3)):
        seconds = []
        for seed in range(5):
            game = generate_random_game(*shape, 0.5, seed)
            started = time.perf_counter()
            solve(game, cfg)
            seconds.append(time.perf_counter() - started)
        medians.append(statistics.median(seconds))
        record_property(f"median_seconds_{'x'.join(map(str, shape))}", medians[-1])

    for before, after in zip(medians, medians[1:]):
        if after > 20.0 * before:
            warnings.warn(
                f"median solve time grew {after / before:.1f}x between sizes: {medians}",
                stacklevel=1,
            )
