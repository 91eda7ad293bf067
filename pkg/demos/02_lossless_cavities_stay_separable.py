"""
No cavity loss, no entanglement
===============================

Without cavity decay the joint stationary state is diagonal in the atom and
the symmetric mode ``c``, with thermal photon statistics.  Mapped back onto
the two physical modes it stays separable.
"""

# %%
from cavityent import (
    ModelParams,
    kappa0_physical_state,
    kappa0_stationary_state,
    mode_populations,
    steady_state,
    traced_negativity,
)

params = ModelParams(n_t=1.0, cutoff=10).with_kappa(0.0)
numeric = steady_state(params, params.layout())
closed = kappa0_stationary_state(1.0, 10)
print("photon distribution (solver):     ", mode_populations(numeric)[:5].round(6))
print("photon distribution (closed form):", mode_populations(closed)[:5].round(6))

# %%
# per-mode cutoff 6 in the physical picture
for n_t in (0.2, 0.5, 1.0, 2.0):
    rho = kappa0_physical_state(ModelParams(n_t=n_t), cutoff=6)
    print(f"n_T = {n_t:3.1f}   N = {traced_negativity(rho).value:.2e}")

# %%
# Truncating the symmetric mode at a total photon number and then mapping it
# to the two modes is *not* a local operation; it leaves a small spurious
# negativity that disappears as the cutoff grows.
from cavityent import effective_to_physical

for cutoff in (3, 6, 12):
    p = ModelParams(n_t=1.0, cutoff=cutoff)
    rho = effective_to_physical(kappa0_stationary_state(1.0, cutoff), p)
    print(f"total-photon cutoff {cutoff:2d}: N = {traced_negativity(rho).value:.2e}")
