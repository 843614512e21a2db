"""Model primitives and the elementary variance/cost algebra.

The state follows ``theta_t = rho * theta_{t-1} + eta_t`` with
``theta_0 ~ N(0, sigma0_sq)`` and ``eta_t ~ N(0, sigma_sq)``. Each period the
agent buys a Gaussian signal of precision ``x_t`` at cost ``c * x_t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ParameterError(ValueError):
    """Raised when an input lies outside the model's domain."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def _bound_violations(rho, sigma0_sq, sigma_sq, c, delta) -> list[str]:
    out = []
    checks = [
        ("rho", rho, lambda v: 0.0 < v < 1.0, "must satisfy 0 < rho < 1"),
        ("sigma0_sq", sigma0_sq, lambda v: v >= 0.0, "must satisfy sigma0_sq >= 0"),
        ("sigma_sq", sigma_sq, lambda v: v > 0.0, "must satisfy sigma_sq > 0"),
        ("c", c, lambda v: v > 0.0, "must satisfy c > 0"),
        ("delta", delta, lambda v: 0.0 <= v < 1.0, "must satisfy 0 <= delta < 1"),
    ]
    for name, value, ok, msg in checks:
        try:
            value = float(value)
        except (TypeError, ValueError):
            out.append(f"{name}={value!r} is not a real number")
            continue
        if not math.isfinite(value) or not ok(value):
            out.append(f"{name}={value!r} {msg}")
    return out


@dataclass(frozen=True)
class ModelParams:
    """The five model primitives. Bounds are checked once, at construction."""

    rho: float
    sigma0_sq: float
    sigma_sq: float
    c: float
    delta: float

    def __post_init__(self):
        bad = _bound_violations(self.rho, self.sigma0_sq, self.sigma_sq, self.c, self.delta)
        if bad:
            raise ParameterError(bad)
        for name in ("rho", "sigma0_sq", "sigma_sq", "c", "delta"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def replace(self, **changes) -> "ModelParams":
        fields = self.as_dict()
        fields.update(changes)
        return ModelParams(**fields)

    def as_dict(self) -> dict:
        return {
            "rho": self.rho,
            "sigma0_sq": self.sigma0_sq,
            "sigma_sq": self.sigma_sq,
            "c": self.c,
            "delta": self.delta,
        }

    def as_tuple(self) -> tuple:
        return (self.rho, self.sigma0_sq, self.sigma_sq, self.c, self.delta)


def validate_params(candidate) -> ModelParams:
    """Build a ``ModelParams`` from a ``(rho, sigma0_sq, sigma_sq, c, delta)`` tuple
    or a mapping with those keys.

    Every violated bound is reported in a single ``ParameterError``.
    """
    if isinstance(candidate, ModelParams):
        return candidate
    if isinstance(candidate, dict):
        missing = [k for k in ("rho", "sigma0_sq", "sigma_sq", "c", "delta") if k not in candidate]
        if missing:
            raise ParameterError([f"missing parameter {k}" for k in missing])
        values = [candidate[k] for k in ("rho", "sigma0_sq", "sigma_sq", "c", "delta")]
    else:
        values = list(candidate)
        if len(values) != 5:
            raise ParameterError(f"expected 5 parameters, got {len(values)}")
    return ModelParams(*values)


@dataclass(frozen=True)
class PeriodCostBreakdown:
    posterior_variance: float
    signal_precision: float
    action_cost: float
    information_cost: float
    total: float


def posterior_variance(P: float, x: float) -> float:
    """Posterior variance ``(1/P + x)^-1`` after a signal of precision ``x``."""
    if not P > 0:
        raise ParameterError(f"prediction variance P={P!r} must be > 0")
    if not x >= 0:
        raise ParameterError(f"precision x={x!r} must be >= 0")
    # P / (1 + P x) keeps V <= P exactly in floating point
    return P / (1.0 + P * x)


def precision_for(P: float, V_target: float) -> float:
    """Smallest precision that brings prediction variance ``P`` down to ``V_target``."""
    if not P > 0:
        raise ParameterError(f"prediction variance P={P!r} must be > 0")
    if not V_target > 0:
        raise ParameterError(f"target variance V={V_target!r} must be > 0")
    return max(1.0 / V_target - 1.0 / P, 0.0)


def predict_variance(params: ModelParams, V: float) -> float:
    """Next period's prediction variance ``rho^2 V + sigma^2``."""
    if not V >= 0:
        raise ParameterError(f"posterior variance V={V!r} must be >= 0")
    return params.rho**2 * V + params.sigma_sq


def period_cost(params: ModelParams, V: float, P: float) -> PeriodCostBreakdown:
    """Expected action cost ``V`` plus information cost ``c (1/V - 1/P)``."""
    if not V > 0:
        raise ParameterError(f"posterior variance V={V!r} must be > 0")
    if V > P:
        raise ParameterError(f"posterior variance V={V!r} exceeds prediction variance P={P!r}")
    x = 1.0 / V - 1.0 / P if V < P else 0.0
    info = params.c * x
    return PeriodCostBreakdown(
        posterior_variance=float(V),
        signal_precision=x,
        action_cost=float(V),
        information_cost=info,
        total=V + info,
    )


def cost_assumption(params: ModelParams) -> tuple[float, bool]:
    """Return ``(bound, holds)`` where information is bought in steady state iff
    ``c < bound = sigma^4 / ((1 - delta rho^2)(1 - rho^2)^2)``."""
    r2 = params.rho**2
    bound = params.sigma_sq**2 / ((1.0 - params.delta * r2) * (1.0 - r2) ** 2)
    return bound, params.c < bound
