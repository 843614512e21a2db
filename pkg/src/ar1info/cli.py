"""Command-line interface.

    ar1info solve    --rho 0.5 --sigma0-sq 0 --sigma-sq 1 --c 1 --delta 0
    ar1info trace    ... --horizon 20 [--format csv|json] [--out FILE]
    ar1info simulate ... --horizon 20 --paths 100000 --seed 1
    ar1info statics  ...
    ar1info verify   ... --grid 512
    ar1info sweep    ... --axis rho --from 0.05 --to 0.99 --steps 200 [--svg FILE]

A JSON file given with ``--config`` supplies defaults using the flag names with
underscores (``sigma0_sq``, ``from`` ...); explicit flags override it.
Exit codes: 0 success, 1 computation or verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bellman import ConvergenceError, GridConfig, bellman_residual, envelope_check, greedy_policy, value_at, value_iteration
from .model import ModelParams, ParameterError
from .simulate import SimConfig, simulate_paths
from .statics import PRIMITIVES, statics_report
from .steady_state import DEFAULT_TOL, SolverError, steady_report, trace_policy
from .svgplot import Panel, Series, render_svg

COMMANDS = ("solve", "trace", "simulate", "statics", "verify", "sweep")
MODEL_KEYS = ("rho", "sigma0_sq", "sigma_sq", "c", "delta")
OPTION_KEYS = ("horizon", "paths", "seed", "grid", "tol", "axis", "from", "to", "steps", "out", "format", "svg")
DEFAULT_FORMAT = {"solve": "json", "statics": "json", "verify": "json", "trace": "csv", "simulate": "csv", "sweep": "csv"}

TRACE_COLUMNS = ["t", "p_t", "v_t", "x_t", "cost_t"]
SIM_COLUMNS = TRACE_COLUMNS + ["mse_emp", "mse_se", "cost_emp"]
STATICS_COLUMNS = ["quantity", "wrt", "analytic", "finite_diff", "rel_discrepancy"]
SWEEP_OUTPUTS = ("v_star", "x_star", "c_star")

STATICS_MAX_DISCREPANCY = 1e-4
ENVELOPE_TOL = 1e-3
VALUE_IDENTITY_TOL = 1e-3
POLICY_SPACINGS = 5.0


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: ModelParams
    horizon: int = 20
    paths: int = 10_000
    seed: int = 0
    grid: int = 512
    tol: float = DEFAULT_TOL
    axis: Optional[str] = None
    lo: Optional[float] = None
    hi: Optional[float] = None
    steps: int = 50
    out: Optional[str] = None
    fmt: str = "json"
    svg: Optional[str] = None
    extra: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--rho", type=float)
    g.add_argument("--sigma0-sq", dest="sigma0_sq", type=float)
    g.add_argument("--sigma-sq", dest="sigma_sq", type=float)
    g.add_argument("--c", type=float)
    g.add_argument("--delta", type=float)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--tol", type=float)
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=("json", "csv"))

    parser = _Parser(prog="ar1info", description="Optimal learning about an AR(1) state.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="steady-state report")
    p = sub.add_parser("trace", parents=[common], help="deterministic optimal variance path")
    p.add_argument("--horizon", type=int)
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo check of the variance path")
    p.add_argument("--horizon", type=int)
    p.add_argument("--paths", type=int)
    p.add_argument("--seed", type=int)
    sub.add_parser("statics", parents=[common], help="analytic vs finite-difference comparative statics")
    p = sub.add_parser("verify", parents=[common], help="value-iteration check of the closed-form policy")
    p.add_argument("--grid", type=int)
    p = sub.add_parser("sweep", parents=[common], help="steady state along one parameter axis")
    p.add_argument("--axis", choices=PRIMITIVES)
    p.add_argument("--from", dest="from_", type=float)
    p.add_argument("--to", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--svg", metavar="PATH")
    return parser


def parse_cli(argv) -> RunConfig:
    """Parse ``argv`` (without the program name). Raises ``UsageError``."""
    ns = vars(_build_parser().parse_args(list(argv)))
    command = ns.pop("command")
    config_path = ns.pop("config")
    if "from_" in ns:
        ns["from"] = ns.pop("from_")

    merged = {}
    if config_path is not None:
        try:
            with open(config_path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {config_path}: {exc}")
        if not isinstance(data, dict):
            raise UsageError(f"config {config_path} must hold a JSON object")
        unknown = sorted(set(data) - set(MODEL_KEYS) - set(OPTION_KEYS))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(data)
    merged.update({k: v for k, v in ns.items() if v is not None})

    missing = [k for k in MODEL_KEYS if k not in merged]
    if missing:
        raise UsageError("missing required parameters: " + ", ".join("--" + k.replace("_", "-") for k in missing))
    try:
        params = ModelParams(*(merged[k] for k in MODEL_KEYS))
    except ParameterError as exc:
        raise UsageError(f"invalid parameters: {exc}")

    cfg = RunConfig(command=command, params=params, fmt=merged.get("format") or DEFAULT_FORMAT[command])
    for key in ("horizon", "paths", "seed", "grid", "steps"):
        if key in merged:
            setattr(cfg, key, merged[key])
    if "tol" in merged:
        cfg.tol = float(merged["tol"])
    cfg.out = merged.get("out")
    cfg.svg = merged.get("svg")
    cfg.axis = merged.get("axis")
    cfg.lo = merged.get("from")
    cfg.hi = merged.get("to")
    _check_options(cfg)
    return cfg


def _check_options(cfg: RunConfig):
    if cfg.fmt not in ("json", "csv"):
        raise UsageError(f"--format must be json or csv, got {cfg.fmt!r}")
    if not 0 < cfg.tol <= 1e-6:
        raise UsageError(f"--tol must lie in (0, 1e-6], got {cfg.tol!r}")
    for key, low in (("horizon", 1), ("paths", 1), ("grid", 64), ("seed", 0)):
        val = getattr(cfg, key)
        if not isinstance(val, int) or isinstance(val, bool) or val < low:
            raise UsageError(f"--{key} must be an integer >= {low}, got {val!r}")
    if cfg.command == "sweep":
        if cfg.axis not in PRIMITIVES:
            raise UsageError(f"--axis must be one of {', '.join(PRIMITIVES)}")
        if cfg.lo is None or cfg.hi is None:
            raise UsageError("sweep needs --from and --to")
        cfg.lo, cfg.hi = float(cfg.lo), float(cfg.hi)
        if not cfg.lo < cfg.hi:
            raise UsageError(f"--from ({cfg.lo}) must be below --to ({cfg.hi})")
        if not isinstance(cfg.steps, int) or cfg.steps < 2:
            raise UsageError(f"--steps must be an integer >= 2, got {cfg.steps!r}")
        for end in (cfg.lo, cfg.hi):
            try:
                cfg.params.replace(**{cfg.axis: end})
            except ParameterError as exc:
                raise UsageError(f"sweep range leaves the parameter domain: {exc}")
    elif cfg.svg is not None:
        raise UsageError("--svg only applies to sweep")


# -- output helpers -----------------------------------------------------------

def _clean(value):
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def dumps(doc) -> str:
    # repr-based float output: shortest string that round-trips the double
    return json.dumps(_clean(doc), indent=2, allow_nan=False) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: RunConfig, text: str, stdout):
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        stdout.write(text)


# -- commands -----------------------------------------------------------------

def cmd_solve(cfg: RunConfig, stdout=sys.stdout) -> int:
    report = steady_report(cfg.params, cfg.tol)
    doc = report.as_dict()
    doc["params"] = cfg.params.as_dict()
    _emit(cfg, dumps(doc), stdout)
    return 0


def cmd_trace(cfg: RunConfig, stdout=sys.stdout) -> int:
    trace = trace_policy(cfg.params, cfg.horizon, cfg.tol)
    rows = [(r.t, r.p_t, r.v_t, r.x_t, r.cost_t) for r in trace.rows]
    if cfg.fmt == "csv":
        text = to_csv(TRACE_COLUMNS, rows)
    else:
        text = dumps({"params": cfg.params.as_dict(), "v_star": trace.v_star,
                      "rows": [dict(zip(TRACE_COLUMNS, r)) for r in rows]})
    _emit(cfg, text, stdout)
    return 0


def cmd_simulate(cfg: RunConfig, stdout=sys.stdout) -> int:
    stats = simulate_paths(cfg.params, SimConfig(cfg.horizon, cfg.paths, cfg.seed), cfg.tol)
    rows = list(zip(stats.t.tolist(), stats.p_t, stats.v_t, stats.x_t, stats.cost_t,
                    stats.mse_emp, stats.mse_se, stats.cost_emp))
    if cfg.fmt == "csv":
        text = to_csv(SIM_COLUMNS, rows)
    else:
        text = dumps({"params": cfg.params.as_dict(), "n_paths": cfg.paths, "seed": cfg.seed,
                      "rows": [dict(zip(SIM_COLUMNS, r)) for r in rows]})
    _emit(cfg, text, stdout)
    return 0


def cmd_statics(cfg: RunConfig, stdout=sys.stdout) -> int:
    rep = statics_report(cfg.params)
    rows = list(rep.rows())
    if cfg.fmt == "csv":
        text = to_csv(STATICS_COLUMNS, rows)
    else:
        text = dumps({
            "params": cfg.params.as_dict(),
            "step": rep.step,
            "table": [dict(zip(STATICS_COLUMNS, r)) for r in rows],
            "max_rel_discrepancy": rep.max_rel_discrepancy,
            "sign_audit": [
                {"clause": c.name, "inequality": c.inequality, "value": c.value, "passed": c.passed}
                for c in rep.sign_audit
            ],
        })
    _emit(cfg, text, stdout)
    failed = [c.name for c in rep.sign_audit if not c.passed]
    if rep.max_rel_discrepancy > STATICS_MAX_DISCREPANCY:
        failed.append("finite_difference_agreement")
    if failed:
        raise CheckFailed("failed checks: " + ", ".join(failed))
    return 0


def run_verify(params: ModelParams, n_points: int, tol: float = DEFAULT_TOL) -> list[dict]:
    """Value-iteration checks of the closed-form policy; one dict per check."""
    report = steady_report(params, tol)
    gcfg = GridConfig(n_points=n_points)
    grid = value_iteration(params, gcfg)
    checks = []

    def add(name, value, limit):
        ok = math.isfinite(value) and value <= limit
        checks.append({"check": name, "value": value, "limit": limit, "passed": bool(ok)})

    checks.append({"check": "value_iteration_converged", "value": grid.final_sweep_delta,
                   "limit": grid.config.sweep_tol, "passed": True, "iterations": grid.iterations_used})
    d = params.delta
    add("bellman_residual", bellman_residual(params, grid), grid.config.sweep_tol * (1.0 + d / (1.0 - d)))
    policy_err = float(np.max(np.abs(greedy_policy(grid, grid.nodes) - np.minimum(grid.nodes, report.v_star))))
    add("policy_agreement", policy_err, POLICY_SPACINGS * grid.spacing)
    env = envelope_check(params, grid)
    if math.isfinite(env):
        add("envelope", env, ENVELOPE_TOL)
    if report.assumption_holds:
        psi_star = value_at(grid, report.p_star)
        add("value_identity", abs(psi_star - report.c_star / (1.0 - d)) / psi_star, VALUE_IDENTITY_TOL)
    return checks


def cmd_verify(cfg: RunConfig, stdout=sys.stdout) -> int:
    try:
        checks = run_verify(cfg.params, cfg.grid, cfg.tol)
    except ConvergenceError as exc:
        raise CheckFailed(f"value_iteration_converged: {exc}")
    for c in checks:
        stdout.write(f"{'PASS' if c['passed'] else 'FAIL'}  {c['check']:<26} {c['value']:.3e}  (limit {c['limit']:.3e})\n")
    if cfg.out:
        write_atomic(cfg.out, dumps({"params": cfg.params.as_dict(), "grid": cfg.grid, "checks": checks}))
    failed = [c["check"] for c in checks if not c["passed"]]
    if failed:
        raise CheckFailed("failed checks: " + ", ".join(failed))
    return 0


@dataclass(frozen=True)
class SweepTable:
    axis: str
    values: np.ndarray
    v_star: np.ndarray
    x_star: np.ndarray
    c_star: np.ndarray
    assumption_holds: np.ndarray

    def rows(self):
        return zip(self.values, self.v_star, self.x_star, self.c_star, self.assumption_holds)


def sweep(params: ModelParams, axis: str, lo: float, hi: float, steps: int, tol: float = DEFAULT_TOL) -> SweepTable:
    values = np.linspace(lo, hi, steps)
    reports = [steady_report(params.replace(**{axis: float(v)}), tol) for v in values]
    return SweepTable(
        axis=axis,
        values=values,
        v_star=np.array([r.v_star for r in reports]),
        x_star=np.array([r.x_star for r in reports]),
        c_star=np.array([r.c_star for r in reports]),
        assumption_holds=np.array([r.assumption_holds for r in reports]),
    )


AXIS_LABELS = {"rho": "rho", "delta": "delta", "c": "c", "sigma_sq": "sigma^2"}


def sweep_svg(table: SweepTable, params: ModelParams) -> str:
    fixed = ", ".join(f"{k}={v:g}" for k, v in params.as_dict().items() if k not in (table.axis, "sigma0_sq"))
    panels = []
    for q in SWEEP_OUTPUTS:
        s = Series(q, table.values.tolist(), getattr(table, q).tolist(), table.assumption_holds.tolist())
        panels.append(Panel(f"{q} vs {AXIS_LABELS[table.axis]}", AXIS_LABELS[table.axis], q, [s]))
    return render_svg(panels, cols=1, title=f"Steady state ({fixed}); dashed: cost assumption fails")


def cmd_sweep(cfg: RunConfig, stdout=sys.stdout) -> int:
    table = sweep(cfg.params, cfg.axis, cfg.lo, cfg.hi, cfg.steps, cfg.tol)
    header = [cfg.axis, *SWEEP_OUTPUTS, "assumption_holds"]
    rows = list(table.rows())
    if cfg.fmt == "csv":
        text = to_csv(header, rows)
    else:
        text = dumps({"axis": cfg.axis, "params": cfg.params.as_dict(),
                      "rows": [dict(zip(header, r)) for r in rows]})
    svg = sweep_svg(table, cfg.params) if cfg.svg else None
    _emit(cfg, text, stdout)
    if svg is not None:
        write_atomic(cfg.svg, svg)
    return 0


HANDLERS = {
    "solve": cmd_solve,
    "trace": cmd_trace,
    "simulate": cmd_simulate,
    "statics": cmd_statics,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def _error(kind: str, message: str, stderr):
    stderr.write(json.dumps({"error": {"type": kind, "message": message}}) + "\n")


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_cli(argv)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 2
    try:
        return HANDLERS[cfg.command](cfg, stdout)
    except CheckFailed as exc:
        _error("check_failed", str(exc), stderr)
        return 1
    except (SolverError, ConvergenceError, ParameterError, ArithmeticError) as exc:
        _error(type(exc).__name__, str(exc), stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
