"""Weighted optimistic optimization (WOO) for multi-objective black-box problems.

Minimizes the weighted Tchebycheff scalarization of a box-constrained problem
with a deterministic optimistic space-partitioning search, collects the
non-dominated samples, and checks the additive epsilon indicator of that set
against the finite-time bounds.
"""

__version__ = "0.1.0"

from .core import Box, BudgetExhausted, ConfigError, DomainError, EvaluationCounter, hadamard, norm
from .pareto import (
    DominanceRelation,
    ParetoArchive,
    ReferenceSet,
    archive_insert,
    compare,
    epsilon_indicator,
    nondominated_filter,
    unary_epsilon,
)
from .scalarization import TchebycheffScalarizer, lipschitz_bound, scalarize, scalarized_objective
from .benchmarks import MultiObjectiveProblem, SyntheticInstance, fonseca_fleming, get_problem, reference_set, synthetic
from .woo import HmaxSchedule, RunTrace, WooConfig, best_sample, hmax_schedule, run
from .analysis import (
    SmoothnessModel,
    estimate_delta,
    estimate_near_opt_dim,
    estimate_smoothness,
    h_of_t,
    regret,
    theorem3_bound,
    theorem4_curve,
)

__all__ = [
    "Box", "BudgetExhausted", "ConfigError", "DomainError", "EvaluationCounter", "hadamard", "norm",
    "DominanceRelation", "ParetoArchive", "ReferenceSet", "archive_insert", "compare",
    "epsilon_indicator", "nondominated_filter", "unary_epsilon",
    "TchebycheffScalarizer", "lipschitz_bound", "scalarize", "scalarized_objective",
    "MultiObjectiveProblem", "SyntheticInstance", "fonseca_fleming", "get_problem", "reference_set", "synthetic",
    "HmaxSchedule", "RunTrace", "WooConfig", "best_sample", "hmax_schedule", "run",
    "SmoothnessModel", "estimate_delta", "estimate_near_opt_dim", "estimate_smoothness", "h_of_t",
    "regret", "theorem3_bound", "theorem4_curve",
]
