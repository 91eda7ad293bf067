"""
Entanglement versus noise intensity
===================================

Starting from the ground state and empty cavities, the cavity entanglement
builds up on a time scale of a few ``1/g`` and settles.  At every time it is
largest for an intermediate noise intensity.  A coarser grid than the
default keeps this script fast; pass ``kappa=1.0`` to ``time_scan_spec`` for the
alternative decay rate.
"""

# %%
from dataclasses import replace

import numpy as np

from cavityent import Axis, scan_time, time_scan_spec
from cavityent.scans import time_grid

spec = time_scan_spec()
spec = replace(spec, axes=(Axis("n_t", 0.05, 5.0, 11), Axis("t", 0.0, 20.0, 11)))
result = scan_time(spec)
n_vals, t_vals, grid = time_grid(result)

# %%
print("t \\ n_T " + " ".join(f"{n:6.2f}" for n in n_vals))
for j, t in enumerate(t_vals):
    print(f"{t:6.1f}  " + " ".join(f"{1e3 * v:6.3f}" for v in grid[:, j]))
print("(negativity x 1e3)")

# %%
measured = time_grid(result, "neg_measured")[2]
k = np.unravel_index(np.argmax(grid), grid.shape)
print(f"peak at n_T = {n_vals[k[0]]:.2f}, t = {t_vals[k[1]]:.1f}")
print(f"measuring the atom raises it by a factor {measured[k] / grid[k]:.2f}")

# %%
# the full grid as CSV, ready for any plotting tool
print(result.to_csv().splitlines()[0])
