"""Dynamic programming operators and cone geometry."""

from bundle_solve.dp.cones import (
    cone_distances,
    in_best_response_cone,
    in_policy_cone,
    min_shift_to_best_response_cone,
)
from bundle_solve.dp.operators import (
    apply_D,
    apply_Dhat,
    dp_step,
    policy_value,
    regret_objective,
)

__all__ = [
    "apply_D",
    "apply_Dhat",
    "cone_distances",
    "dp_step",
    "in_best_response_cone",
    "in_policy_cone",
    "min_shift_to_best_response_cone",
    "policy_value",
    "regret_objective",
]
