"""Print rho*, the rho-sweep argmin of V*, and their gap for (sigma^2, c, delta) = (1, 4, 0.99)."""

import numpy as np

from ar1info import ModelParams
from ar1info.cli import sweep
from ar1info.steady_state import rho_threshold

p = ModelParams(0.5, 0.0, 1.0, 4.0, 0.99)
table = sweep(p, "rho", 0.05, 0.99, 200)
argmin = table.values[np.argmin(table.v_star)]
print(f"rho*            = {rho_threshold(p):.6f}")
print(f"sweep argmin V* = {argmin:.6f}")
print(f"grid step       = {table.values[1] - table.values[0]:.6f}")
