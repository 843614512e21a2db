import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ar1info import (
    ModelParams,
    ParameterError,
    f_derivative,
    f_objective,
    policy_step,
    precision_for,
    solve_v_star,
    steady_report,
    time_to_steady_state,
    trace_policy,
)
from ar1info.steady_state import rho_threshold
from conftest import PARAMS_A, model_params
from oracles import bisect_v_star, central_diff, fixed_point_v_star, iterate_no_learning, random_params

# bisection and fixed-point iteration both give this value (see oracles.py)
V_STAR_08_099 = 1.5653461561433641


def test_f_objective_examples():
    assert f_objective(PARAMS_A, 1.0) == 1.0
    p = ModelParams(0.3, 1.0, 2.0, 1.0, 0.0)
    assert f_objective(p, 0.7) == pytest.approx(1 / 0.49, rel=1e-15)
    assert f_objective(ModelParams(0.9, 0, 1, 4, 0.5), 1.0) == pytest.approx(0.8763773999572663, rel=1e-14)
    with pytest.raises(ParameterError):
        f_objective(PARAMS_A, 0.0)


def test_f_derivative_examples():
    assert f_derivative(PARAMS_A, 1.0) == -2.0
    assert f_derivative(ModelParams(0.3, 1.0, 2.0, 1.0, 0.0), 0.5) == pytest.approx(-16.0, rel=1e-15)
    p = ModelParams(0.9, 0, 1, 4, 0.99)
    assert f_derivative(p, solve_v_star(p)) < 0
    with pytest.raises(ParameterError):
        f_derivative(PARAMS_A, -1.0)


@given(model_params(), st.floats(0.05, 20))
def test_f_derivative_matches_finite_difference(p, V):
    h = 1e-6 * V
    fd = central_diff(lambda v: f_objective(p, v), V, h)
    assert f_derivative(p, V) == pytest.approx(fd, rel=1e-5, abs=1e-8 / V**3)


def test_solve_v_star_examples():
    assert solve_v_star(PARAMS_A) == 1.0
    assert solve_v_star(ModelParams(0.7, 0, 2.5, 9.0, 0.0)) == pytest.approx(3.0, rel=1e-15)
    p = ModelParams(0.8, 0, 1, 4, 0.99)
    v = solve_v_star(p)
    assert 0 < v < 2
    assert v == pytest.approx(V_STAR_08_099, rel=1e-13)
    assert f_objective(p, v) == pytest.approx(0.25, rel=1e-12)


def test_solve_v_star_rejects_loose_tol():
    with pytest.raises(ParameterError):
        solve_v_star(PARAMS_A, tol=1e-3)


@settings(max_examples=200, deadline=None)
@given(model_params())
def test_solve_v_star_residual_and_bounds(p):
    v = solve_v_star(p)
    assert abs(p.c * f_objective(p, v) - 1) <= 1e-12
    assert 0 < v <= math.sqrt(p.c) * (1 + 1e-15)
    assert v == pytest.approx(bisect_v_star(p), rel=1e-11)


def test_solve_v_star_matches_fixed_point(rng):
    for _ in range(50):
        p = random_params(rng, holds=bool(rng.integers(2)))
        assert solve_v_star(p) == pytest.approx(fixed_point_v_star(p), rel=1e-10)


def test_uniqueness_from_random_brackets(rng):
    for _ in range(200):
        p = random_params(rng, holds=bool(rng.integers(2)))
        ref = solve_v_star(p)
        for _ in range(10):
            a, b = np.sort(np.exp(rng.uniform(-8, 8, size=2)))
            assert solve_v_star(p, bracket=(a, b)) == pytest.approx(ref, rel=1e-9)


def test_f_strictly_decreasing_where_positive(rng):
    for _ in range(20):
        p = random_params(rng, holds=bool(rng.integers(2)), delta=(0.0, 0.999))
        V = np.sort(np.exp(rng.uniform(-6, 6, size=1000)))
        vals = np.array([f_objective(p, v) for v in V])
        pos = vals > 0
        assert all(f_derivative(p, v) < 0 for v in V[pos])
        first_nonpos = np.argmax(~pos) if (~pos).any() else len(V)
        assert np.all(pos[:first_nonpos]) and not np.any(pos[first_nonpos:])
        assert np.all(np.diff(vals[:first_nonpos]) < 0)


def test_threshold_equivalence(rng):
    for _ in range(300):
        p = random_params(rng, holds=bool(rng.integers(2)), margin=1e-4)
        r = steady_report(p)
        assert (r.x_star > 1e-12) == (p.c < r.cost_bound)
        assert precision_for(r.p_star, r.v_star) > 0 if r.assumption_holds else r.v_star >= r.v_zero * (1 - 1e-12)


def test_delta_zero_closed_form(rng):
    for _ in range(100):
        p = ModelParams(rng.uniform(0.01, 0.99), 0.0, rng.uniform(0.1, 5), math.exp(rng.uniform(-5, 5)), 0.0)
        assert abs(solve_v_star(p) - math.sqrt(p.c)) / math.sqrt(p.c) <= 1e-12


def test_steady_report_worked_example():
    r = steady_report(PARAMS_A)
    assert r.v_star == 1.0
    assert r.p_star == 1.25
    assert r.x_star == pytest.approx(0.2, abs=1e-15)
    assert r.c_star == pytest.approx(1.2, abs=1e-15)
    assert r.v_zero == pytest.approx(4 / 3, rel=1e-15)
    assert r.assumption_holds and r.t_star == 1


def test_rho_threshold_values():
    assert rho_threshold(ModelParams(0.5, 0, 1, 4, 0.99)) == pytest.approx(0.79927, abs=1e-5)
    assert abs(rho_threshold(ModelParams(0.5, 0, 1, 4, 0.99)) - 0.8) < 1e-3
    assert rho_threshold(ModelParams(0.5, 0, 1, 0.25, 0.0)) == pytest.approx(math.sqrt(2), rel=1e-15)


def test_report_when_assumption_fails():
    r = steady_report(ModelParams(0.5, 0, 1, 4, 0))
    assert not r.assumption_holds
    assert r.x_star == 0.0 and r.t_star is None
    assert r.v_star == pytest.approx(2.0, rel=1e-14)
    assert r.c_star == r.v_star


@settings(max_examples=200, deadline=None)
@given(model_params())
def test_report_invariants(p):
    r = steady_report(p)
    assert r.p_star == p.rho**2 * r.v_star + p.sigma_sq
    assert (r.x_star > 0) == r.assumption_holds
    if r.assumption_holds:
        assert r.x_star == precision_for(r.p_star, r.v_star)
        assert r.v_star < r.v_zero
        assert r.t_star >= 1
    assert r.c_star == pytest.approx(r.v_star + p.c * r.x_star, rel=1e-15)


def test_time_to_steady_state_examples():
    assert time_to_steady_state(PARAMS_A, 1.0) == 1
    p = ModelParams(0.9, 0, 1, 4, 0)
    assert iterate_no_learning(p, 3) == pytest.approx([1.0, 1.81, 2.4661], rel=1e-14)
    assert time_to_steady_state(p, solve_v_star(p)) == 3
    assert time_to_steady_state(ModelParams(0.5, 100, 1, 1, 0), 1.0) == 1
    with pytest.raises(ParameterError):
        time_to_steady_state(ModelParams(0.5, 0, 1, 4, 0), 2.0)


def test_time_to_steady_state_matches_iteration(rng):
    for _ in range(100):
        p = random_params(rng)
        v = solve_v_star(p)
        path = iterate_no_learning(p, 100000)
        expected = next(t for t, P in enumerate(path, start=1) if P >= v * (1 - 1e-13))
        assert abs(time_to_steady_state(p, v) - expected) <= 1


def test_policy_step_examples():
    V, x = policy_step(PARAMS_A, 1.0, 1.25)
    assert V == 1.0 and x == pytest.approx(0.2, abs=1e-15)
    assert policy_step(PARAMS_A, 1.0, 0.8) == (0.8, 0.0)
    V, x = policy_step(PARAMS_A, 2.0, 2.4661)
    assert V == 2.0 and x == pytest.approx(0.5 - 1 / 2.4661, rel=1e-14)
    assert x == pytest.approx(0.0945, abs=1e-4)


def test_trace_worked_example():
    rows = trace_policy(PARAMS_A, 3).rows
    expected = [(1.0, 1.0, 0.0, 1.0), (1.25, 1.0, 0.2, 1.2), (1.25, 1.0, 0.2, 1.2)]
    for row, exp in zip(rows, expected):
        assert (row.p_t, row.v_t, row.x_t, row.cost_t) == pytest.approx(exp, abs=1e-10)
    assert [r.t for r in rows] == [1, 2, 3]


def test_trace_waits_until_t_star():
    tr = trace_policy(ModelParams(0.9, 0, 1, 4, 0), 4)
    x = tr.column("x_t")
    assert x[0] == 0 and x[1] == 0 and x[2] > 0 and x[3] > 0


def test_trace_when_assumption_fails():
    p = ModelParams(0.5, 0, 1, 4, 0)
    tr = trace_policy(p, 200)
    assert np.all(tr.column("x_t") == 0)
    v = tr.column("v_t")
    assert np.all(np.diff(v) >= 0)
    assert v[-1] == pytest.approx(4 / 3, rel=1e-12)


def test_trace_rejects_bad_horizon():
    with pytest.raises(ParameterError):
        trace_policy(PARAMS_A, 0)


@settings(max_examples=100, deadline=None)
@given(model_params(), st.integers(1, 60))
def test_trace_invariants(p, T):
    tr = trace_policy(p, T)
    r = steady_report(p)
    assert tr.rows[0].p_t == p.rho**2 * p.sigma0_sq + p.sigma_sq
    for a, b in zip(tr.rows, tr.rows[1:]):
        assert b.p_t == p.rho**2 * a.v_t + p.sigma_sq
    for row in tr.rows:
        assert row.v_t == min(row.p_t, r.v_star)
    if r.assumption_holds:
        for row in tr.rows:
            if row.t >= r.t_star:
                assert row.v_t == r.v_star


def test_trace_monotone_from_zero_initial_variance(rng):
    for _ in range(50):
        p = random_params(rng, sigma0_sq=(0.0, 0.0))
        r = steady_report(p)
        P = trace_policy(p, r.t_star + 10).column("p_t")
        assert np.all(np.diff(P[: r.t_star]) >= 0)
        assert np.all(P[r.t_star:] == r.p_star)


def test_rho_star_stationarity(rng):
    checked = 0
    while checked < 30:
        p = random_params(rng, holds=bool(rng.integers(2)), delta=(0.05, 0.99))
        rs = rho_threshold(p)
        if not 0.06 < rs < 0.94:
            continue
        v_of = lambda r: solve_v_star(p.replace(rho=r), tol=1e-14)
        assert abs(central_diff(v_of, rs, 1e-4)) < 1e-4
        assert central_diff(v_of, rs - 0.05, 1e-4) < 0
        assert central_diff(v_of, rs + 0.05, 1e-4) > 0
        checked += 1
