"""Steady-state V* and x* against rho, delta and c with sigma^2 = 1.

Writes ``figure1.csv`` (long format) and ``figure1.svg`` (2 x 3 panels) into
the output directory. Curves are dashed where the cost assumption fails.
The parameter families below are this script's choice.

    python scripts/figure1.py --outdir figures
"""

import argparse
import csv
import os

import numpy as np

from ar1info import ModelParams
from ar1info.cli import sweep, write_atomic
from ar1info.svgplot import Panel, Series, render_svg

BASE = dict(sigma0_sq=0.0, sigma_sq=1.0)
PANELS = [
    # (axis, grid, fixed family label, list of fixed-parameter dicts)
    ("rho", np.linspace(0.01, 0.99, 197), [dict(c=4.0, delta=d) for d in (0.0, 0.5, 0.99)]),
    ("delta", np.linspace(0.0, 0.99, 100), [dict(c=4.0, rho=r) for r in (0.5, 0.8, 0.95)]),
    ("c", np.linspace(0.05, 10.0, 200), [dict(rho=r, delta=0.99) for r in (0.5, 0.8, 0.95)]),
]


def family_label(fixed):
    return ", ".join(f"{k}={v:g}" for k, v in fixed.items())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="figures")
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    records = []
    v_panels, x_panels = [], []
    for axis, grid, families in PANELS:
        v_series, x_series = [], []
        for fixed in families:
            start = dict(rho=0.5, c=1.0, delta=0.0, **BASE)
            start.update(fixed)
            start[axis] = float(grid[0])
            table = sweep(ModelParams(**start), axis, float(grid[0]), float(grid[-1]), len(grid))
            label = family_label(fixed)
            holds = table.assumption_holds.tolist()
            v_series.append(Series(label, table.values.tolist(), table.v_star.tolist(), holds))
            x_series.append(Series(label, table.values.tolist(), table.x_star.tolist(), holds))
            for row in table.rows():
                records.append([axis, label, *row])
        v_panels.append(Panel(f"V* vs {axis}", axis, "V*", v_series))
        x_panels.append(Panel(f"x* vs {axis}", axis, "x*", x_series))

    csv_path = os.path.join(args.outdir, "figure1.csv")
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["axis", "family", "value", "v_star", "x_star", "c_star", "assumption_holds"])
        w.writerows(records)
    svg_path = os.path.join(args.outdir, "figure1.svg")
    write_atomic(svg_path, render_svg(v_panels + x_panels, cols=3, panel_width=420, panel_height=300,
                                      title="Steady state with sigma^2 = 1 (dashed: cost assumption fails)"))
    print(f"wrote {csv_path} and {svg_path}")


if __name__ == "__main__":
    main()
