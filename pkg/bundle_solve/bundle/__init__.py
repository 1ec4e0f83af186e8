"""Equilibrium bundle core: dual quantities, canonical section and differential."""

from bundle_solve.bundle.differential import (
    bias_correction_direction,
    bundle_differential,
    coefficient_matrix,
    project_to_bundle,
)
from bundle_solve.bundle.dual import (
    dual_quantities,
    projected_gradient,
    solve_dual_value,
    unbiased_objective,
)
from bundle_solve.bundle.section import (
    canonical_descent_step,
    canonical_section,
    initial_barrier,
)

__all__ = [
    "bias_correction_direction",
    "bundle_differential",
    "canonical_descent_step",
    "canonical_section",
    "coefficient_matrix",
    "dual_quantities",
    "initial_barrier",
    "project_to_bundle",
    "projected_gradient",
    "solve_dual_value",
    "unbiased_objective",
]
