"""
Steady-state double resonance and photon jumps
==============================================

The steady-state entanglement needs both incoherent processes: it vanishes
without noise, without cavity loss, and again for very strong loss.  At the
optimum we then ask what a single detected photon does to the state.
"""

# %%
from dataclasses import replace

import numpy as np

from cavityent import Axis, ModelParams, jump_diagnostic, scan_steady, steady_scan_spec
from cavityent.scans import steady_grid

spec = replace(
    steady_scan_spec(),
    axes=(Axis("n_t", 0.05, 5.0, 9), Axis("kappa", 0.05, 10.0, 9, "log")),
)
result = scan_steady(spec)
n_vals, k_vals, grid = steady_grid(result)

print("n_T \\ kappa " + " ".join(f"{k:6.2f}" for k in k_vals))
for i, n in enumerate(n_vals):
    print(f"{n:9.2f}  " + " ".join(f"{1e3 * v:6.3f}" for v in grid[i]))
print("(negativity x 1e3; the first column is the lossless limit)")

# %%
i, j = np.unravel_index(np.argmax(grid), grid.shape)
print(f"optimum near n_T = {n_vals[i]:.2f}, kappa = {k_vals[j]:.2f}")

# %%
# One photon leaves the cavities: apply c to the steady state.  Compare with a
# short stretch of evolution during which no photon was detected.
cutoff = result.cutoffs_used[int(np.argmax(result.column("neg_traced")))]
params = ModelParams(gamma=0.2, n_t=n_vals[i], cutoff=cutoff).with_kappa(k_vals[j])
record = jump_diagnostic(params)
for key in ("neg_steady", "neg_after_jump", "neg_no_jump"):
    print(f"{key:15s} {record[key]:.6f}")

# %%
# For weak loss the jump does help.
record = jump_diagnostic(ModelParams(gamma=0.2, n_t=2.0, cutoff=8).with_kappa(0.2))
print(record["neg_steady"], "->", record["neg_after_jump"])
