"""Data models for bundle-solve."""

from bundle_solve.models.game import DynamicGame
from bundle_solve.models.policy import BarrierParameter, Policy, ValueFunction
from bundle_solve.models.quantities import BundleDifferential, ConeDistances, DualQuantities
from bundle_solve.models.result import (
    BatchRecord,
    BatchSummary,
    SolveResult,
    SolverState,
    SolveStatus,
    TraceRecord,
)

__all__ = [
    "BarrierParameter",
    "BatchRecord",
    "BatchSummary",
    "BundleDifferential",
    "ConeDistances",
    "DualQuantities",
    "DynamicGame",
    "Policy",
    "SolveResult",
    "SolveStatus",
    "SolverState",
    "TraceRecord",
    "ValueFunction",
]
