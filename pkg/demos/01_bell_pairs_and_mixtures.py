"""
Calibrating the entanglement measure
====================================

The logarithmic negativity (base 2) of a Bell pair is exactly 1.  Mixing the
one-photon Bell state with the two-mode vacuum never destroys the
entanglement completely.
"""

# %%
import numpy as np

from cavityent import log_negativity
from cavityent.validation import bell_pair, vacuum_triplet_mixture

print("Bell pair:", log_negativity(bell_pair()).value)

# %%
# p |psi+><psi+| + (1 - p) |00><00| for a few weights
for p in (0.01, 0.1, 0.5, 0.9, 1.0):
    result = log_negativity(vacuum_triplet_mixture(p))
    print(f"p = {p:4.2f}   N = {result.value:.6f}   min PT eigenvalue = {result.min_pt_eigenvalue:+.4f}")

# %%
# the p = 1/2 value in closed form
print(np.log2(1 + np.sqrt(0.5) - 0.5))
