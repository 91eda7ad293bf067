"""Entanglement of two cavity modes coupled to a thermally driven two-level atom.

Dense-matrix simulation of the atom-two-cavity master equation, logarithmic
negativity of the cavity modes, and parameter sweeps over noise intensity,
cavity decay and time.
"""

from .dynamics import (
    SteadyStateSolution,
    Superoperator,
    Trajectory,
    build_superoperator,
    evolve,
    evolve_exact,
    evolve_samples,
    residual_norm,
    solve_steady_state,
    steady_state,
)
from .entanglement import (
    MeasurementOutcome,
    NegativityResult,
    atom_measured_negativity,
    log_negativity,
    partial_trace,
    partial_transpose,
    traced_negativity,
)
from .errors import (
    CavityEntError,
    ConfigError,
    InvalidStateError,
    JumpProbabilityError,
    LayoutError,
    NumericalError,
)
from .model import (
    DensityMatrix,
    HilbertLayout,
    ModelParams,
    Picture,
    dissipators,
    effective_to_physical,
    ground_vacuum,
    hamiltonian,
    kappa0_physical_state,
    kappa0_stationary_state,
    liouvillian_apply,
    mode_populations,
)
from .scans import (
    Axis,
    ScanResult,
    ScanSpec,
    jump_diagnostic,
    scan_steady,
    scan_time,
    steady_scan_spec,
    time_scan_spec,
    time_series,
)
from .validation import validate

__version__ = "0.1.0"

__all__ = [
    "Axis", "CavityEntError", "ConfigError", "DensityMatrix", "HilbertLayout",
    "InvalidStateError", "JumpProbabilityError", "LayoutError", "MeasurementOutcome",
    "ModelParams", "NegativityResult", "NumericalError", "Picture", "ScanResult", "ScanSpec",
    "SteadyStateSolution", "Superoperator", "Trajectory", "atom_measured_negativity",
    "build_superoperator", "dissipators", "effective_to_physical", "evolve", "evolve_exact",
    "evolve_samples", "time_scan_spec", "steady_scan_spec", "ground_vacuum", "hamiltonian",
    "jump_diagnostic", "kappa0_physical_state", "kappa0_stationary_state",
    "liouvillian_apply", "log_negativity", "mode_populations", "partial_trace",
    "partial_transpose", "residual_norm", "scan_steady", "scan_time", "solve_steady_state",
    "steady_state", "time_series", "traced_negativity", "validate",
]
