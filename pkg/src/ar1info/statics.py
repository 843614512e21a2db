"""Comparative statics of the steady state.

Analytic derivatives come from implicitly differentiating the target-variance
condition; entries without their own closed form are filled by the chain rule
through ``P* = rho^2 V* + sigma^2`` and ``x* = 1/V* - 1/P*``. A central
finite-difference table over ``steady_report`` serves as the cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ModelParams, ParameterError, cost_assumption
from .steady_state import f_derivative, rho_threshold, solve_v_star, steady_report

QUANTITIES = ("v_star", "x_star", "p_star", "c_star")
PRIMITIVES = ("rho", "delta", "c", "sigma_sq")

_FD_TOL = 1e-15
# floor on |derivative| when forming relative errors, in units of |quantity| / |primitive|
_REL_FLOOR = 1e-3


def _require_interior(params: ModelParams):
    bound, holds = cost_assumption(params)
    if not holds:
        raise ParameterError(
            f"comparative statics need c < {bound!r} (interior steady state); got c={params.c!r}"
        )


def analytic_statics(params: ModelParams, tol: float = 1e-14) -> dict[tuple[str, str], float]:
    """Table ``{(quantity, primitive): derivative}`` with 16 entries."""
    _require_interior(params)
    rho, s2, c, d = params.rho, params.sigma_sq, params.c, params.delta
    r2 = rho**2
    V = solve_v_star(params, tol)
    P = r2 * V + s2
    x = 1.0 / V - 1.0 / P
    fp = f_derivative(params, V)

    # delta
    dV_dd = (r2 / P**2) / fp
    dx_dd = -(1.0 / V**2 - r2 / P**2) * dV_dd
    dC_dd = c * (1.0 - d) * r2 / P**2 * dV_dd
    # c
    dV_dc = (-1.0 / c**2) / fp
    dx_dc = -(1.0 / V**2 - r2 / P**2) * dV_dc
    dC_dc = c * (1.0 - d) * r2 / P**2 * dV_dc + x
    # rho
    dP_dr = -(2.0 * rho / fp) * (1.0 / V**2 + 1.0 / c)
    dV_dr = (dP_dr - 2.0 * rho * V) / r2
    dx_dr = -dV_dr / V**2 + dP_dr / P**2
    dC_dr = c / P**2 * ((1.0 - d) * dP_dr + 2.0 * rho * d * V)
    # sigma^2
    dV_ds = -(2.0 * d * r2 / P**3) / fp
    dP_ds = r2 * dV_ds + 1.0
    dx_ds = -dV_ds / V**2 + dP_ds / P**2
    dC_ds = c / P**2 * ((1.0 - d) * r2 * dV_ds + 1.0)

    return {
        ("v_star", "rho"): dV_dr,
        ("x_star", "rho"): dx_dr,
        ("p_star", "rho"): dP_dr,
        ("c_star", "rho"): dC_dr,
        ("v_star", "delta"): dV_dd,
        ("x_star", "delta"): dx_dd,
        ("p_star", "delta"): r2 * dV_dd,
        ("c_star", "delta"): dC_dd,
        ("v_star", "c"): dV_dc,
        ("x_star", "c"): dx_dc,
        ("p_star", "c"): r2 * dV_dc,
        ("c_star", "c"): dC_dc,
        ("v_star", "sigma_sq"): dV_ds,
        ("x_star", "sigma_sq"): dx_ds,
        ("p_star", "sigma_sq"): dP_ds,
        ("c_star", "sigma_sq"): dC_ds,
    }


def _fd_step(name: str, value: float, step: float) -> float:
    if name == "delta":
        # additive: delta = 0 is a legal value
        return step
    return value * step


def finite_difference_statics(params: ModelParams, step: float = 1e-6) -> dict[tuple[str, str], float]:
    """Central differences of the steady state w.r.t. each primitive.

    Primitives are perturbed by ``theta (1 +- step)``, except ``delta`` which is
    shifted by ``+- step``; when ``delta < 2 step`` a second-order forward
    difference is used instead. Every perturbed point must stay valid and keep
    the cost assumption.
    """
    _require_interior(params)
    if not 0 < step < 0.1:
        raise ParameterError(f"step={step!r} must lie in (0, 0.1)")

    def evaluate(name, value):
        try:
            p = params.replace(**{name: value})
        except ParameterError as exc:
            raise ParameterError(f"perturbing {name} to {value!r} leaves the parameter domain: {exc}")
        bound, holds = cost_assumption(p)
        if not holds:
            raise ParameterError(f"perturbing {name} to {value!r} crosses the cost-assumption bound {bound!r}")
        r = steady_report(p, _FD_TOL)
        return {q: getattr(r, q) for q in QUANTITIES}

    table = {}
    for name in PRIMITIVES:
        theta = getattr(params, name)
        h = _fd_step(name, theta, step)
        if name == "delta" and theta < 2 * step:
            f0, f1, f2 = evaluate(name, theta), evaluate(name, theta + h), evaluate(name, theta + 2 * h)
            for q in QUANTITIES:
                table[(q, name)] = (-3.0 * f0[q] + 4.0 * f1[q] - f2[q]) / (2.0 * h)
        else:
            up, down = evaluate(name, theta + h), evaluate(name, theta - h)
            for q in QUANTITIES:
                table[(q, name)] = (up[q] - down[q]) / (2.0 * h)
    return table


def relative_discrepancy(params: ModelParams, quantity: str, primitive: str, exact: float, approx: float, level: float) -> float:
    """``|exact - approx|`` relative to ``|exact|``, floored at ``1e-3 |quantity| / |primitive|``."""
    theta = max(abs(getattr(params, primitive)), 1e-2)
    floor = _REL_FLOOR * max(abs(level), 1e-12) / theta
    return abs(exact - approx) / max(abs(exact), floor)


@dataclass(frozen=True)
class SignClause:
    name: str
    inequality: str
    value: float
    passed: bool


def sign_audit(params: ModelParams, analytic: dict[tuple[str, str], float]) -> tuple[SignClause, ...]:
    """Check the signs the monotonicity results assert, one clause each."""
    _require_interior(params)
    a = analytic
    clauses = [
        ("delta:V", "dV*/ddelta < 0", a[("v_star", "delta")], a[("v_star", "delta")] < 0),
        ("delta:x", "dx*/ddelta > 0", a[("x_star", "delta")], a[("x_star", "delta")] > 0),
        ("c:V", "dV*/dc > 0", a[("v_star", "c")], a[("v_star", "c")] > 0),
        ("c:x", "dx*/dc < 0", a[("x_star", "c")], a[("x_star", "c")] < 0),
        ("cost:rho", "dC*/drho > 0", a[("c_star", "rho")], a[("c_star", "rho")] > 0),
        ("cost:delta", "dC*/ddelta < 0", a[("c_star", "delta")], a[("c_star", "delta")] < 0),
        ("cost:c", "dC*/dc > 0", a[("c_star", "c")], a[("c_star", "c")] > 0),
        ("cost:sigma_sq", "dC*/dsigma^2 > 0", a[("c_star", "sigma_sq")], a[("c_star", "sigma_sq")] > 0),
    ]
    dv = a[("v_star", "rho")]
    if params.delta == 0.0:
        v = math.sqrt(params.c)
        zero = abs(dv) <= 1e-9 * v / params.rho
        clauses.append(("rho:V", "dV*/drho = 0 (delta = 0)", dv, zero))
    else:
        rs = rho_threshold(params)
        if params.rho < rs:
            clauses.append(("rho:V", f"dV*/drho < 0 (rho < rho* = {rs:.6g})", dv, dv < 0))
        else:
            clauses.append(("rho:V", f"dV*/drho > 0 (rho >= rho* = {rs:.6g})", dv, dv > 0))
    return tuple(SignClause(n, ineq, float(val), bool(ok)) for n, ineq, val, ok in clauses)


@dataclass(frozen=True)
class StaticsReport:
    analytic: dict
    finite_diff: dict
    step: float
    discrepancy: dict
    max_rel_discrepancy: float
    sign_audit: tuple[SignClause, ...]

    @property
    def signs_ok(self) -> bool:
        return all(cl.passed for cl in self.sign_audit)

    def rows(self):
        for q in QUANTITIES:
            for w in PRIMITIVES:
                yield q, w, self.analytic[(q, w)], self.finite_diff[(q, w)], self.discrepancy[(q, w)]


def statics_report(params: ModelParams, step: float = 1e-6) -> StaticsReport:
    analytic = analytic_statics(params)
    fd = finite_difference_statics(params, step)
    base = steady_report(params, _FD_TOL)
    disc = {
        (q, w): relative_discrepancy(params, q, w, analytic[(q, w)], fd[(q, w)], getattr(base, q))
        for q in QUANTITIES
        for w in PRIMITIVES
    }
    return StaticsReport(
        analytic=analytic,
        finite_diff=fd,
        step=step,
        discrepancy=disc,
        max_rel_discrepancy=max(disc.values()),
        sign_audit=sign_audit(params, analytic),
    )
