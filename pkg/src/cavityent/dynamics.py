"""Superoperator form of the master equation, time evolution and steady states."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import numerics
from .errors import (
    DimensionOverflowError,
    InvalidStateError,
    LayoutError,
    ResidualError,
    SingularMatrixError,
    TraceDriftError,
)
from .model import (
    DensityMatrix,
    HilbertLayout,
    ModelParams,
    dissipators,
    excitation_numbers,
    hamiltonian,
    liouvillian_apply,
)

log = logging.getLogger(__name__)

TRACE_DRIFT_TOL = 1e-6
STEADY_RESIDUAL_TOL = 1e-9
POSITIVITY_TOL = 1e-8


@dataclass(frozen=True)
class Superoperator:
    """Generator acting on column-stacked density matrices."""

    layout: HilbertLayout
    mat: np.ndarray = field(repr=False)

    def __matmul__(self, v):
        return self.mat @ v

    def apply(self, rho) -> np.ndarray:
        mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
        d = self.layout.dim
        return numerics.unvec(self.mat @ numerics.vec(mat), d)


def jump_superoperator(rate: float, op: np.ndarray) -> np.ndarray:
    """Matrix of ``rho -> 2 rate op rho op^dagger``."""
    return 2.0 * rate * numerics.kron(op.conj(), op)


def _check_dim(layout: HilbertLayout) -> None:
    if layout.dim**2 > numerics.MAX_DIM:
        raise DimensionOverflowError(
            f"superoperator dimension {layout.dim ** 2} exceeds {numerics.MAX_DIM}; "
            "lower the cutoff"
        )


@lru_cache(maxsize=256)
def build_superoperator(params: ModelParams, layout: HilbertLayout) -> Superoperator:
    """Dense ``D^2 x D^2`` matrix of the master-equation generator.

    Uses ``vec(A X B) = (B^T (x) A) vec(X)`` for every term.
    """
    _check_dim(layout)
    d = layout.dim
    ident = np.eye(d, dtype=complex)
    h = hamiltonian(params, layout)
    mat = -1j * (numerics.kron(ident, h) - numerics.kron(h.T, ident))
    for rate, op in dissipators(params, layout):
        n_op = op.conj().T @ op
        mat -= rate * (numerics.kron(ident, n_op) + numerics.kron(n_op.T, ident))
        mat += jump_superoperator(rate, op)
    mat.setflags(write=False)
    return Superoperator(layout, mat)


def default_dt(params: ModelParams) -> float:
    fastest = max(params.g, params.kappa_a, params.kappa_b, params.gamma * (params.n_t + 1))
    return 0.01 / fastest


def _rk4_step(gen: np.ndarray, y: np.ndarray, h: float) -> np.ndarray:
    k1 = gen @ y
    k2 = gen @ (y + 0.5 * h * k1)
    k3 = gen @ (y + 0.5 * h * k2)
    k4 = gen @ (y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _finalise(layout: HilbertLayout, y: np.ndarray, drift_tol: float):
    mat = numerics.unvec(y, layout.dim)
    mat = 0.5 * (mat + mat.conj().T)
    tr = np.trace(mat).real
    drift = abs(tr - 1.0)
    if drift > drift_tol:
        raise TraceDriftError(f"trace drifted by {drift:.3e}; reduce dt")
    return DensityMatrix(layout, mat / tr), drift


@dataclass(frozen=True)
class Trajectory:
    """States sampled along an integration, with the pre-correction trace drift."""

    times: np.ndarray
    states: list[DensityMatrix]
    trace_drift: np.ndarray


def evolve_samples(
    params: ModelParams,
    layout: HilbertLayout,
    rho0: DensityMatrix,
    times,
    dt: float | None = None,
    *,
    generator: np.ndarray | None = None,
    drift_tol: float = TRACE_DRIFT_TOL,
    check_states: bool = True,
) -> Trajectory:
    """Integrate with fixed-step RK4 and record the state at each of ``times``.

    Integration continues from the raw (uncorrected) vector between samples;
    each emitted sample is Hermitised and renormalised.  ``generator``
    overrides the master-equation superoperator.
    """
    if rho0.layout != layout:
        raise LayoutError("initial state layout does not match")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be a non-decreasing sequence of values >= 0")
    dt = default_dt(params) if dt is None else float(dt)
    if not dt > 0:
        raise ValueError("dt must be positive")
    gen = build_superoperator(params, layout).mat if generator is None else generator

    y = numerics.vec(rho0.mat).astype(complex)
    now = 0.0
    states, drifts = [], []
    for target in times:
        span = target - now
        steps = int(np.floor(span / dt + 1e-9))
        for _ in range(steps):
            y = _rk4_step(gen, y, dt)
        rest = span - steps * dt
        if rest > 1e-12 * max(1.0, target):
            y = _rk4_step(gen, y, rest)
        now = target
        state, drift = _finalise(layout, y, drift_tol)
        if check_states:
            state.validate(positivity_tol=POSITIVITY_TOL)
        states.append(state)
        drifts.append(drift)
    return Trajectory(times, states, np.array(drifts))


def evolve(
    params: ModelParams,
    layout: HilbertLayout,
    rho0: DensityMatrix,
    t: float,
    dt: float | None = None,
) -> DensityMatrix:
    """State at time ``t`` starting from ``rho0`` (fixed-step RK4)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return evolve_samples(params, layout, rho0, [t], dt).states[0]


def evolve_exact(params: ModelParams, layout: HilbertLayout, rho0: DensityMatrix, t: float) -> DensityMatrix:
    """Propagate with the matrix exponential of the generator (reference path)."""
    gen = build_superoperator(params, layout).mat
    y = numerics.matrix_exponential(gen * t) @ numerics.vec(rho0.mat)
    return DensityMatrix(layout, numerics.unvec(y, layout.dim))


@dataclass(frozen=True)
class SteadyStateSolution:
    state: DensityMatrix
    residual: float
    trace_error: float
    pivot_ratio: float  # smallest / largest |pivot| of the constrained system


def _constrained_solve(system: np.ndarray, trace_row: np.ndarray):
    system = np.array(system)
    system[0, :] = trace_row
    rhs = np.zeros(system.shape[0], dtype=complex)
    rhs[0] = 1.0
    try:
        lu, perm = numerics.lu_factor(system)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"steady state is not unique: {exc}") from exc
    x = numerics.lu_solve(lu, perm, rhs)
    x += numerics.lu_solve(lu, perm, rhs - system @ x)
    pivots = np.abs(lu.diagonal())
    return x, float(pivots.min() / pivots.max())


def sector_generator(params: ModelParams, layout: HilbertLayout):
    """Generator restricted to operators ``|a><b|`` with equal excitation number.

    The restriction is exact: the generator maps this sector into itself, and
    a unique steady state lies inside it.  Returns the square matrix and the
    ``(rows, cols)`` index arrays of the sector basis.
    """
    k = excitation_numbers(layout)
    rows, cols = np.nonzero(k[:, None] == k[None, :])
    d = layout.dim
    gen = np.empty((rows.size, rows.size), dtype=complex)
    unit = np.zeros((d, d), dtype=complex)
    for n, (a, b) in enumerate(zip(rows, cols)):
        unit[a, b] = 1.0
        gen[:, n] = liouvillian_apply(params, layout, unit)[rows, cols]
        unit[a, b] = 0.0
    return gen, rows, cols


def solve_steady_state(
    params: ModelParams,
    layout: HilbertLayout,
    tol: float = STEADY_RESIDUAL_TOL,
    *,
    sector: bool = False,
) -> SteadyStateSolution:
    """Kernel of the generator with the trace constraint replacing its first row.

    With ``sector=True`` the solve runs on the excitation-balanced sector only
    (see :func:`sector_generator`), which makes large cutoffs affordable; the
    full solve additionally detects kernels that are degenerate outside that
    sector.

    Raises
    ------
    SingularMatrixError
        If the constrained system is singular, i.e. the kernel is degenerate.
    ResidualError
        If the solution does not satisfy ``||L(rho)||_max <= tol``.
    """
    rates = [rate for rate, _ in dissipators(params, layout)]
    if not rates:
        raise ValueError("steady state requires at least one dissipative rate > 0")
    d = layout.dim
    if sector:
        gen, rows, cols = sector_generator(params, layout)
        x, pivot_ratio = _constrained_solve(gen, (rows == cols).astype(complex))
        mat = np.zeros((d, d), dtype=complex)
        mat[rows, cols] = x
    else:
        sup = build_superoperator(params, layout)
        x, pivot_ratio = _constrained_solve(sup.mat, numerics.vec(np.eye(d)))
        mat = numerics.unvec(x, d)

    mat = 0.5 * (mat + mat.conj().T)
    tr = np.trace(mat).real
    state = DensityMatrix(layout, mat / tr)
    residual = residual_norm(params, layout, state)
    if residual > tol:
        raise ResidualError(f"steady-state residual {residual:.3e} exceeds {tol:.1e}")
    lam = state.min_eigenvalue()
    if lam < -POSITIVITY_TOL:
        raise InvalidStateError(f"steady state has negative eigenvalue {lam:.3e}")
    log.debug("steady state: residual %.2e, pivot ratio %.2e", residual, pivot_ratio)
    return SteadyStateSolution(state, residual, abs(tr - 1.0), pivot_ratio)


def steady_state(
    params: ModelParams,
    layout: HilbertLayout,
    tol: float = STEADY_RESIDUAL_TOL,
    *,
    sector: bool = False,
) -> DensityMatrix:
    return solve_steady_state(params, layout, tol, sector=sector).state


def residual_norm(params: ModelParams, layout: HilbertLayout, rho) -> float:
    """Largest entry of ``|L(rho)|``; zero exactly for stationary states."""
    return numerics.max_abs(liouvillian_apply(params, layout, rho))
