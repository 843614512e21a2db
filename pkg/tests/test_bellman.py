import math

import numpy as np
import pytest

from ar1info import ModelParams, ParameterError, period_cost, steady_report
from ar1info.bellman import (
    ConvergenceError,
    GridConfig,
    bellman_operator,
    bellman_residual,
    envelope_check,
    greedy_policy,
    value_at,
    value_iteration,
)
from conftest import PARAMS_A
from oracles import random_params

P_HIGH_DELTA = ModelParams(0.8, 0, 1, 4, 0.99)


@pytest.fixture(scope="module")
def grid_a():
    return value_iteration(PARAMS_A, GridConfig(512))


@pytest.fixture(scope="module")
def fine_high_delta():
    return value_iteration(P_HIGH_DELTA, GridConfig(4096))


def test_grid_config_defaults():
    cfg = GridConfig().resolve(ModelParams(0.5, 10, 1, 1, 0))
    assert cfg.p_min == 1.0
    assert cfg.p_max == pytest.approx(max(4 / 3, 3.5) * 1.05)


@pytest.mark.parametrize(
    "cfg",
    [GridConfig(n_points=32), GridConfig(p_min=0.5), GridConfig(p_min=2.0, p_max=1.5), GridConfig(sweep_tol=0.0)],
)
def test_grid_config_rejects(cfg):
    with pytest.raises(ParameterError):
        cfg.resolve(PARAMS_A)


def test_delta_zero_is_static_cost():
    p = ModelParams(0.6, 0.3, 1.4, 2.0, 0.0)
    g = value_iteration(p, GridConfig(256))
    exact = [period_cost(p, min(P, math.sqrt(p.c)), P).total for P in g.nodes]
    assert g.psi == pytest.approx(exact, rel=1e-12)


def test_worked_example_node(grid_a):
    g = value_iteration(PARAMS_A, GridConfig(513, p_min=1.0, p_max=1.5))
    i = int(np.argmin(np.abs(g.nodes - 1.25)))
    assert g.nodes[i] == pytest.approx(1.25, abs=1e-12)
    assert g.psi[i] == pytest.approx(1.2, abs=1e-10)


def test_grid_invariants(grid_a, fine_high_delta):
    for g in (grid_a, fine_high_delta):
        assert np.all(np.isfinite(g.psi)) and np.all(g.psi > 0)
        assert np.all(g.greedy_v > 0) and np.all(g.greedy_v <= g.nodes)
        assert g.final_sweep_delta <= g.config.sweep_tol
        assert np.all(np.diff(g.nodes) > 0)


def test_value_identity_high_delta(fine_high_delta):
    r = steady_report(P_HIGH_DELTA)
    psi = value_at(fine_high_delta, r.p_star)
    assert abs(psi - r.c_star / (1 - P_HIGH_DELTA.delta)) / psi <= 1e-3


def test_greedy_policy_examples(grid_a):
    assert greedy_policy(grid_a, 1.25) == pytest.approx(1.0, abs=grid_a.spacing)
    assert greedy_policy(grid_a, 1.05) == pytest.approx(1.0, abs=grid_a.spacing)
    g = value_iteration(ModelParams(0.9, 0, 1, 4, 0), GridConfig(512))
    assert greedy_policy(g, 2.4661) == pytest.approx(2.0, abs=2 * g.spacing)
    assert greedy_policy(g, 1.5) == pytest.approx(1.5, abs=g.spacing)
    with pytest.raises(ParameterError):
        greedy_policy(g, 0.5)


def test_envelope_delta_zero(grid_a):
    # Psi(P) = 2 - 1/P above the kink: only differencing error remains
    h = grid_a.spacing
    P_low = 1.05 + 2 * h
    assert envelope_check(PARAMS_A, grid_a) <= h**2 / P_low**2 * 1.01


@pytest.mark.slow
def test_envelope_refinement(fine_high_delta):
    fine = envelope_check(P_HIGH_DELTA, fine_high_delta)
    assert fine < 1e-3
    coarse = envelope_check(P_HIGH_DELTA, value_iteration(P_HIGH_DELTA, GridConfig(64)))
    assert coarse > fine


def test_residual_bounds(grid_a, fine_high_delta):
    d = P_HIGH_DELTA.delta
    assert bellman_residual(P_HIGH_DELTA, fine_high_delta) <= fine_high_delta.config.sweep_tol * (1 + d / (1 - d))
    assert bellman_residual(PARAMS_A, grid_a) <= 1e-10


def test_residual_detects_perturbation(grid_a):
    psi = grid_a.psi.copy()
    psi[len(psi) // 2] += 0.1
    assert bellman_residual(PARAMS_A, grid_a, psi) >= 0.099


def test_psi_monotone(fine_high_delta, grid_a):
    for g in (grid_a, fine_high_delta):
        assert np.all(np.diff(g.psi) >= 0)


def test_contraction_rate(fine_high_delta):
    d = fine_high_delta.sweep_deltas[-11:]
    assert np.all(d[1:] / d[:-1] <= P_HIGH_DELTA.delta + 1e-3)


def test_nonconvergence_reports():
    with pytest.raises(ConvergenceError) as exc:
        value_iteration(P_HIGH_DELTA, GridConfig(64, max_iters=5))
    assert exc.value.iterations == 5 and exc.value.final_delta > exc.value.sweep_tol


def test_value_iteration_deterministic():
    p = ModelParams(0.7, 0.2, 1.0, 1.5, 0.8)
    a, b = value_iteration(p, GridConfig(128)), value_iteration(p, GridConfig(128))
    assert np.array_equal(a.psi, b.psi) and np.array_equal(a.greedy_v, b.greedy_v)


def test_policy_agreement_random(rng):
    for _ in range(8):
        p = random_params(rng, delta=(0.0, 0.9))
        g = value_iteration(p, GridConfig(256))
        v = steady_report(p).v_star
        P = rng.uniform(g.nodes[0], g.nodes[-1], size=20)
        assert np.max(np.abs(greedy_policy(g, P) - np.minimum(P, v))) <= 5 * g.spacing
