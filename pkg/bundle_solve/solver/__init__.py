"""Line search solver, verification and batch runs."""

from bundle_solve.solver.batch import game_seed, run_batch
from bundle_solve.solver.config import SolveConfig
from bundle_solve.solver.line_search import inner_converge, initial_state, outer_step, solve
from bundle_solve.solver.records import read_result, read_trace, write_result, write_trace
from bundle_solve.solver.verify import (
    distinct_equilibria,
    nash_gap,
    run_starts,
    scan_policy_space,
    solve_multistart,
    verify_epsilon_equilibrium,
    worst_violation,
)

__all__ = [
    "SolveConfig",
    "distinct_equilibria",
    "game_seed",
    "initial_state",
    "inner_converge",
    "nash_gap",
    "outer_step",
    "read_result",
    "read_trace",
    "run_batch",
    "run_starts",
    "scan_policy_space",
    "solve",
    "solve_multistart",
    "verify_epsilon_equilibrium",
    "worst_violation",
    "write_result",
    "write_trace",
]
