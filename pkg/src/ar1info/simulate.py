"""Seeded Monte Carlo of states, signals and posterior means under the optimal policy.

Random draws come from counter-based Philox streams keyed by
``(seed, period, draw kind)``; path ``i`` always takes the ``i``-th variate of
each stream, so growing ``n_paths`` leaves earlier paths untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, ParameterError
from .steady_state import DEFAULT_TOL, trace_policy

_KIND_INITIAL = 0
_KIND_SHOCK = 1
_KIND_SIGNAL = 2


@dataclass(frozen=True)
class SimConfig:
    horizon: int
    n_paths: int
    seed: int = 0

    def __post_init__(self):
        bad = []
        if int(self.horizon) != self.horizon or self.horizon < 1:
            bad.append(f"horizon={self.horizon!r} must be a positive integer")
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            bad.append(f"n_paths={self.n_paths!r} must be a positive integer")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            bad.append(f"seed={self.seed!r} must be an unsigned 64-bit integer")
        if bad:
            raise ParameterError(bad)


@dataclass(frozen=True)
class EnsembleStats:
    """Per-period analytic and Monte Carlo columns, indexed by ``t - 1``.

    Standard errors are ``nan`` when ``n_paths == 1``.
    """

    t: np.ndarray
    p_t: np.ndarray
    v_t: np.ndarray
    x_t: np.ndarray
    cost_t: np.ndarray
    mse_emp: np.ndarray
    mse_se: np.ndarray
    cost_emp: np.ndarray
    cost_se: np.ndarray
    bias_emp: np.ndarray
    bias_se: np.ndarray
    n_paths: int

    def __eq__(self, other):
        if not isinstance(other, EnsembleStats):
            return NotImplemented
        cols = ("t", "p_t", "v_t", "x_t", "cost_t", "mse_emp", "mse_se",
                "cost_emp", "cost_se", "bias_emp", "bias_se")
        return self.n_paths == other.n_paths and all(
            np.array_equal(getattr(self, k), getattr(other, k), equal_nan=True) for k in cols
        )


def _normals(seed: int, period: int, kind: int, n: int) -> np.ndarray:
    ss = np.random.SeedSequence([int(seed), period, kind])
    return np.random.Generator(np.random.Philox(ss)).standard_normal(n)


def _mean_se(samples: np.ndarray) -> tuple[float, float]:
    n = samples.shape[0]
    mean = float(np.mean(samples))
    if n < 2:
        return mean, math.nan
    return mean, float(np.std(samples, ddof=1) / math.sqrt(n))


def simulate_raw(params: ModelParams, cfg: SimConfig, tol: float = DEFAULT_TOL):
    """Return ``(trace, theta, a)`` with ``theta`` and ``a`` of shape ``(T, n_paths)``."""
    trace = trace_policy(params, cfg.horizon, tol)
    n = cfg.n_paths
    theta = np.sqrt(params.sigma0_sq) * _normals(cfg.seed, 0, _KIND_INITIAL, n)
    m = np.zeros(n)  # posterior mean of theta_0
    thetas = np.empty((cfg.horizon, n))
    actions = np.empty((cfg.horizon, n))
    sigma = math.sqrt(params.sigma_sq)
    for row in trace.rows:
        theta = params.rho * theta + sigma * _normals(cfg.seed, row.t, _KIND_SHOCK, n)
        prior_mean = params.rho * m
        if row.x_t > 0.0:
            s = theta + _normals(cfg.seed, row.t, _KIND_SIGNAL, n) / math.sqrt(row.x_t)
            m = row.v_t * (prior_mean / row.p_t + row.x_t * s)
        else:
            m = prior_mean
        thetas[row.t - 1] = theta
        actions[row.t - 1] = m
    return trace, thetas, actions


def simulate_paths(params: ModelParams, cfg: SimConfig, tol: float = DEFAULT_TOL) -> EnsembleStats:
    trace, theta, a = simulate_raw(params, cfg, tol)
    err = a - theta
    sq = err**2
    x = trace.column("x_t")
    realized = sq + params.c * x[:, None]
    cols = {k: [] for k in ("mse", "mse_se", "cost", "cost_se", "bias", "bias_se")}
    for i in range(cfg.horizon):
        for name, data in (("mse", sq[i]), ("cost", realized[i]), ("bias", err[i])):
            mean, se = _mean_se(data)
            cols[name].append(mean)
            cols[name + "_se"].append(se)
    return EnsembleStats(
        t=np.arange(1, cfg.horizon + 1),
        p_t=trace.column("p_t"),
        v_t=trace.column("v_t"),
        x_t=x,
        cost_t=trace.column("cost_t"),
        mse_emp=np.array(cols["mse"]),
        mse_se=np.array(cols["mse_se"]),
        cost_emp=np.array(cols["cost"]),
        cost_se=np.array(cols["cost_se"]),
        bias_emp=np.array(cols["bias"]),
        bias_se=np.array(cols["bias_se"]),
        n_paths=cfg.n_paths,
    )


def realized_cost_stats(params: ModelParams, cfg: SimConfig, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Per-period mean realized cost ``(a_t - theta_t)^2 + c x_t`` and its standard error."""
    stats = simulate_paths(params, cfg, tol)
    return stats.cost_emp, stats.cost_se
