"""Target variance, steady-state quantities and the closed-form optimal policy.

The optimal posterior variance each period is ``min(P_t, V*)`` where ``V*``
is the unique positive root of ``f(V) = 1/c`` with

    f(V) = 1/V^2 - delta rho^2 / (rho^2 V + sigma^2)^2.

``f(V) > 1/c`` exactly when ``V < V*``, so the sign of ``c f(V) - 1`` brackets
the root from any starting interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import ModelParams, ParameterError, cost_assumption, period_cost, precision_for

DEFAULT_TOL = 1e-12
_MAX_EXPANSIONS = 1024
_MAX_ITERS = 400
_MAX_T_STAR = 10_000_000


class SolverError(ArithmeticError):
    """The root finder could not bracket or converge."""


def f_objective(params: ModelParams, V: float) -> float:
    if not V > 0:
        raise ParameterError(f"variance V={V!r} must be > 0")
    r2 = params.rho**2
    return 1.0 / V**2 - params.delta * r2 / (r2 * V + params.sigma_sq) ** 2


def f_derivative(params: ModelParams, V: float) -> float:
    if not V > 0:
        raise ParameterError(f"variance V={V!r} must be > 0")
    r2 = params.rho**2
    return -2.0 * (1.0 / V**3 - params.delta * r2**2 / (r2 * V + params.sigma_sq) ** 3)


def _scaled_residual(params: ModelParams, V: float) -> float:
    # c f(V) - 1: positive below the root, non-positive at and above it
    return params.c * f_objective(params, V) - 1.0


def solve_v_star(
    params: ModelParams,
    tol: float = DEFAULT_TOL,
    bracket: Optional[tuple[float, float]] = None,
) -> float:
    """Solve ``f(V) = 1/c`` for the target posterior variance.

    Safeguarded secant inside a bisection bracket. The default bracket is
    ``(V_lo, sqrt(c)]`` with ``V_lo`` found by halving ``sqrt(c)``; a caller
    supplied ``bracket`` is expanded outwards until it straddles the root.
    Returns once ``|c f(V) - 1| <= tol`` or the bracket collapses to adjacent
    floats, then picks the neighbouring float with the smallest residual.
    """
    if not (0.0 < tol <= 1e-6):
        raise ParameterError(f"tol={tol!r} must lie in (0, 1e-6]")

    if bracket is None:
        lo = hi = math.sqrt(params.c)
    else:
        lo, hi = float(bracket[0]), float(bracket[1])
        if not (0.0 < lo <= hi) or not math.isfinite(hi):
            raise ParameterError(f"bracket {bracket!r} must satisfy 0 < lo <= hi < inf")

    r_hi = _scaled_residual(params, hi)
    n = 0
    while r_hi > 0.0:
        hi *= 2.0
        r_hi = _scaled_residual(params, hi)
        n += 1
        if n > _MAX_EXPANSIONS or not math.isfinite(r_hi):
            raise SolverError(f"no upper bracket found for V* (params={params})")
    if r_hi == 0.0:
        return hi

    r_lo = _scaled_residual(params, lo)
    n = 0
    while not r_lo > 0.0:
        if r_lo == 0.0:
            return lo
        lo *= 0.5
        r_lo = _scaled_residual(params, lo)
        n += 1
        if n > _MAX_EXPANSIONS or not math.isfinite(r_lo):
            raise SolverError(f"no lower bracket found for V* within {_MAX_EXPANSIONS} halvings")

    best, r_best = (lo, r_lo) if abs(r_lo) < abs(r_hi) else (hi, r_hi)
    width = hi - lo
    for _ in range(_MAX_ITERS):
        if abs(r_best) <= tol:
            break
        if hi - lo <= 4.0 * math.ulp(hi):
            break
        v = hi - r_hi * (hi - lo) / (r_hi - r_lo)
        # fall back to bisection when the secant leaves the bracket or stalls
        if not (lo < v < hi) or (hi - lo) > 0.5 * width:
            v = 0.5 * (lo + hi)
        width = hi - lo
        r = _scaled_residual(params, v)
        if abs(r) < abs(r_best):
            best, r_best = v, r
        if r > 0.0:
            lo, r_lo = v, r
        elif r < 0.0:
            hi, r_hi = v, r
        else:
            return v
    else:
        raise SolverError(f"V* solver did not converge in {_MAX_ITERS} iterations")

    for cand in (math.nextafter(best, 0.0), math.nextafter(best, math.inf)):
        r = _scaled_residual(params, cand)
        if abs(r) < abs(r_best):
            best, r_best = cand, r
    return best


def rho_threshold(params: ModelParams) -> float:
    """Persistence level at which V* switches from falling to rising in rho.

    Reported as-is even when it exceeds one.
    """
    d = params.delta
    return math.sqrt(d / 8.0 + math.sqrt(d**2 / 64.0 + params.sigma_sq**2 / params.c))


def no_learning_variance(params: ModelParams) -> float:
    return params.sigma_sq / (1.0 - params.rho**2)


def prediction_path(params: ModelParams, t: int) -> float:
    """Prediction variance at period ``t`` when no information has been bought."""
    r2t = params.rho ** (2 * t)
    return r2t * params.sigma0_sq + (1.0 - r2t) / (1.0 - params.rho**2) * params.sigma_sq


def time_to_steady_state(params: ModelParams, v_star: float) -> int:
    """First period whose no-learning prediction variance reaches ``v_star``."""
    _, holds = cost_assumption(params)
    if not holds:
        raise ParameterError("steady state is only reached when the cost assumption holds")
    for t in range(1, _MAX_T_STAR + 1):
        if prediction_path(params, t) >= v_star:
            return t
    raise SolverError(f"prediction variance did not reach V*={v_star!r} within {_MAX_T_STAR} periods")


def policy_step(params: ModelParams, v_star: float, P: float) -> tuple[float, float]:
    if not P > 0:
        raise ParameterError(f"prediction variance P={P!r} must be > 0")
    return min(P, v_star), precision_for(P, v_star)


@dataclass(frozen=True)
class SteadyStateReport:
    v_star: float
    p_star: float
    x_star: float
    c_star: float
    rho_star: float
    t_star: Optional[int]
    v_zero: float
    cost_bound: float
    assumption_holds: bool

    def as_dict(self) -> dict:
        return {
            "v_star": self.v_star,
            "x_star": self.x_star,
            "p_star": self.p_star,
            "c_star": self.c_star,
            "rho_star": self.rho_star,
            "t_star": self.t_star,
            "v_zero": self.v_zero,
            "cost_bound": self.cost_bound,
            "assumption_holds": self.assumption_holds,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SteadyStateReport":
        t_star = data["t_star"]
        return cls(
            v_star=float(data["v_star"]),
            p_star=float(data["p_star"]),
            x_star=float(data["x_star"]),
            c_star=float(data["c_star"]),
            rho_star=float(data["rho_star"]),
            t_star=None if t_star is None else int(t_star),
            v_zero=float(data["v_zero"]),
            cost_bound=float(data["cost_bound"]),
            assumption_holds=bool(data["assumption_holds"]),
        )


def steady_report(params: ModelParams, tol: float = DEFAULT_TOL) -> SteadyStateReport:
    v_star = solve_v_star(params, tol)
    p_star = params.rho**2 * v_star + params.sigma_sq
    bound, holds = cost_assumption(params)
    x_star = precision_for(p_star, v_star) if holds else 0.0
    return SteadyStateReport(
        v_star=v_star,
        p_star=p_star,
        x_star=x_star,
        c_star=v_star + params.c * x_star,
        rho_star=rho_threshold(params),
        t_star=time_to_steady_state(params, v_star) if holds else None,
        v_zero=no_learning_variance(params),
        cost_bound=bound,
        assumption_holds=holds,
    )


@dataclass(frozen=True)
class TraceRow:
    t: int
    p_t: float
    v_t: float
    x_t: float
    cost_t: float


@dataclass(frozen=True)
class PolicyTrace:
    rows: tuple[TraceRow, ...]
    v_star: float = field(default=math.nan)

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)


def trace_policy(params: ModelParams, T: int, tol: float = DEFAULT_TOL) -> PolicyTrace:
    """Deterministic variance path under ``V_t = min(P_t, V*)`` for ``t = 1..T``."""
    if int(T) != T or T < 1:
        raise ParameterError(f"horizon T={T!r} must be a positive integer")
    v_star = solve_v_star(params, tol)
    rows = []
    P = params.rho**2 * params.sigma0_sq + params.sigma_sq
    for t in range(1, int(T) + 1):
        V, x = policy_step(params, v_star, P)
        rows.append(TraceRow(t, P, V, x, period_cost(params, V, P).total))
        P = params.rho**2 * V + params.sigma_sq
    return PolicyTrace(tuple(rows), v_star)
