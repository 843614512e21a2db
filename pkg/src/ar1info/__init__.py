"""Optimal sequential information acquisition about a Gaussian AR(1) state."""

from .model import (
    ModelParams,
    ParameterError,
    PeriodCostBreakdown,
    cost_assumption,
    period_cost,
    posterior_variance,
    precision_for,
    predict_variance,
    validate_params,
)
from .steady_state import (
    PolicyTrace,
    SolverError,
    SteadyStateReport,
    f_derivative,
    f_objective,
    policy_step,
    solve_v_star,
    steady_report,
    time_to_steady_state,
    trace_policy,
)

__all__ = [
    "ModelParams",
    "ParameterError",
    "PeriodCostBreakdown",
    "PolicyTrace",
    "SolverError",
    "SteadyStateReport",
    "cost_assumption",
    "f_derivative",
    "f_objective",
    "period_cost",
    "policy_step",
    "posterior_variance",
    "precision_for",
    "predict_variance",
    "solve_v_star",
    "steady_report",
    "time_to_steady_state",
    "trace_policy",
    "validate_params",
]
