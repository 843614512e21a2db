"""Brute-force value iteration on the prediction-variance Bellman equation.

    Psi(P) = min_{0 < V <= P}  V + c (1/V - 1/P) + delta Psi(rho^2 V + sigma^2)

Used as an oracle for the closed-form policy: it never consults ``V*`` except
to place the envelope-check exclusion zone and for the initial guess
``Psi_0(P) = C(min(P, sqrt(c)), P)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import ModelParams, ParameterError
from .steady_state import solve_v_star

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_V_FLOOR = 1e-9     # relative to P
_SEARCH_TOL = 1e-10  # relative to P


class ConvergenceError(RuntimeError):
    def __init__(self, iterations, final_delta, sweep_tol):
        self.iterations = iterations
        self.final_delta = final_delta
        self.sweep_tol = sweep_tol
        super().__init__(
            f"value iteration stopped after {iterations} sweeps with "
            f"sup-norm change {final_delta:.3e} > sweep_tol {sweep_tol:.3e}"
        )


@dataclass(frozen=True)
class GridConfig:
    n_points: int = 512
    p_min: Optional[float] = None
    p_max: Optional[float] = None
    sweep_tol: float = 1e-9
    max_iters: int = 100_000

    def resolve(self, params: ModelParams) -> "GridConfig":
        """Fill default grid edges from ``params`` and check the invariants."""
        p_min = params.sigma_sq if self.p_min is None else float(self.p_min)
        if self.p_max is None:
            p1 = params.rho**2 * params.sigma0_sq + params.sigma_sq
            p_max = max(params.sigma_sq / (1.0 - params.rho**2), p1) * 1.05
        else:
            p_max = float(self.p_max)
        bad = []
        if int(self.n_points) != self.n_points or self.n_points < 64:
            bad.append(f"n_points={self.n_points!r} must be an integer >= 64")
        if p_min < params.sigma_sq * (1.0 - 1e-12):
            bad.append(f"p_min={p_min!r} must be >= sigma_sq={params.sigma_sq!r}")
        if not p_max > p_min:
            bad.append(f"p_max={p_max!r} must exceed p_min={p_min!r}")
        if not self.sweep_tol > 0:
            bad.append(f"sweep_tol={self.sweep_tol!r} must be > 0")
        if self.max_iters < 1:
            bad.append(f"max_iters={self.max_iters!r} must be >= 1")
        if bad:
            raise ParameterError(bad)
        return GridConfig(int(self.n_points), p_min, p_max, float(self.sweep_tol), int(self.max_iters))


@dataclass(frozen=True)
class ValueFunctionGrid:
    nodes: np.ndarray
    psi: np.ndarray
    greedy_v: np.ndarray
    iterations_used: int
    final_sweep_delta: float
    sweep_deltas: np.ndarray = field(repr=False)
    config: GridConfig = field(repr=False)

    @property
    def spacing(self) -> float:
        return float(self.nodes[1] - self.nodes[0])


def _continuation(params: ModelParams, nodes: np.ndarray, psi: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.interp(q, nodes, psi)
    top = nodes[-1]
    above = q > top
    if np.any(above):
        # extrapolate with the envelope slope c / P^2
        out = np.where(above, psi[-1] + params.c / top**2 * (q - top), out)
    return out


def bellman_operator(
    params: ModelParams,
    nodes: np.ndarray,
    psi: np.ndarray,
    warm: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """One application of the Bellman operator at every node.

    Returns ``(new_psi, argmin_v)``. The inner minimisation is a golden-section
    search on ``[1e-9 P, P]``, vectorised across nodes, followed by a comparison
    against the corner ``V = P`` and the optional warm-start points.
    Each node reads only ``psi``, so the result does not depend on evaluation order.
    """
    r2, s2, c, d = params.rho**2, params.sigma_sq, params.c, params.delta
    P = nodes

    def objective(V):
        val = V + c * (1.0 / V - 1.0 / P)
        if d > 0.0:
            val = val + d * _continuation(params, nodes, psi, r2 * V + s2)
        return val

    a = _V_FLOOR * P
    b = P.copy()
    n_iter = int(math.ceil(math.log(_SEARCH_TOL / (1.0 - _V_FLOOR)) / math.log(_INV_PHI)))
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = objective(x1), objective(x2)
    for _ in range(n_iter):
        left = f1 < f2
        # left: minimum in [a, x2]; otherwise in [x1, b]
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        new_x1 = np.where(left, b - _INV_PHI * (b - a), x2)
        new_x2 = np.where(left, x1, a + _INV_PHI * (b - a))
        f_new = objective(np.where(left, new_x1, new_x2))
        f1, f2 = np.where(left, f_new, f2), np.where(left, f1, f_new)
        x1, x2 = new_x1, new_x2

    best_v = np.where(f1 < f2, x1, x2)
    best_f = np.minimum(f1, f2)
    candidates = [P]
    if warm is not None:
        candidates.append(np.clip(warm, _V_FLOOR * P, P))
    for v in candidates:
        fv = objective(v)
        better = fv < best_f
        best_v = np.where(better, v, best_v)
        best_f = np.where(better, fv, best_f)
    return best_f, best_v


def initial_value(params: ModelParams, nodes: np.ndarray) -> np.ndarray:
    v = np.minimum(nodes, math.sqrt(params.c))
    return v + params.c * (1.0 / v - 1.0 / nodes)


def value_iteration(params: ModelParams, cfg: GridConfig = GridConfig()) -> ValueFunctionGrid:
    """Successive approximation of Psi on an evenly spaced grid."""
    cfg = cfg.resolve(params)
    nodes = np.linspace(cfg.p_min, cfg.p_max, cfg.n_points)
    psi = initial_value(params, nodes)
    greedy = None
    deltas = []
    delta = math.inf
    for it in range(1, cfg.max_iters + 1):
        new_psi, greedy = bellman_operator(params, nodes, psi, warm=greedy)
        delta = float(np.max(np.abs(new_psi - psi)))
        deltas.append(delta)
        psi = new_psi
        if delta <= cfg.sweep_tol:
            break
    else:
        raise ConvergenceError(cfg.max_iters, delta, cfg.sweep_tol)
    return ValueFunctionGrid(
        nodes=nodes,
        psi=psi,
        greedy_v=greedy,
        iterations_used=it,
        final_sweep_delta=delta,
        sweep_deltas=np.asarray(deltas),
        config=cfg,
    )


def greedy_policy(grid: ValueFunctionGrid, P):
    """Minimising posterior variance at ``P``, interpolated between nodes."""
    P_arr = np.asarray(P, dtype=float)
    lo, hi = grid.nodes[0], grid.nodes[-1]
    if np.any(P_arr < lo) or np.any(P_arr > hi):
        raise ParameterError(f"P outside grid range [{lo!r}, {hi!r}]")
    out = np.interp(P_arr, grid.nodes, grid.greedy_v)
    return float(out) if out.ndim == 0 else out


def value_at(grid: ValueFunctionGrid, P: float) -> float:
    if not grid.nodes[0] <= P <= grid.nodes[-1]:
        raise ParameterError(f"P={P!r} outside grid range")
    return float(np.interp(P, grid.nodes, grid.psi))


def envelope_check(params: ModelParams, grid: ValueFunctionGrid, margin: float = 0.05) -> float:
    """Max relative error of the central-difference slope of Psi against ``c / P^2``.

    Only stencils lying entirely above ``V* (1 + margin)`` are used; returns
    ``nan`` when the grid has none.
    """
    v_star = solve_v_star(params)
    P = grid.nodes
    cut = v_star * (1.0 + margin)
    idx = np.arange(1, len(P) - 1)
    idx = idx[P[idx - 1] > cut]
    if idx.size == 0:
        return math.nan
    slope = (grid.psi[idx + 1] - grid.psi[idx - 1]) / (P[idx + 1] - P[idx - 1])
    exact = params.c / P[idx] ** 2
    return float(np.max(np.abs(slope - exact) / exact))


def bellman_residual(params: ModelParams, grid: ValueFunctionGrid, psi: Optional[np.ndarray] = None) -> float:
    """Sup-norm gap between stored ``psi`` and one more Bellman application."""
    psi = grid.psi if psi is None else np.asarray(psi, dtype=float)
    new_psi, _ = bellman_operator(params, grid.nodes, psi, warm=grid.greedy_v)
    return float(np.max(np.abs(new_psi - psi)))
