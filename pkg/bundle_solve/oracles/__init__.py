"""Independent reference implementations used to check the primary path."""

from bundle_solve.oracles.brute_force import brute_force_contractions, finite_difference_directional
from bundle_solve.oracles.nash_scan import NashScanResult, grid_nash_scan
from bundle_solve.oracles.value_iteration import value_iteration

__all__ = [
    "NashScanResult",
    "brute_force_contractions",
    "finite_difference_directional",
    "grid_nash_scan",
    "value_iteration",
]
