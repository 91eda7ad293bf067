"""Partial trace, partial transpose and logarithmic negativity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import LayoutError
from .model import ATOM_DIM, DensityMatrix, HilbertLayout, Picture

#: Logarithm base of the negativity; base 2 gives exactly 1 for a Bell pair.
LOG_BASE = 2.0
#: Trace norms up to ``1 + ZERO_WINDOW`` give exactly zero negativity.
ZERO_WINDOW = 1e-12
#: Trace norms below ``1 - CLAMP_WINDOW`` signal an unnormalised state.
CLAMP_WINDOW = 1e-10
MIN_OUTCOME_PROBABILITY = 1e-12


@dataclass(frozen=True)
class NegativityResult:
    value: float
    min_pt_eigenvalue: float
    trace_norm: float

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class MeasurementOutcome:
    """Result of measuring the atom in the ``{|1>, |2>}`` basis."""

    probabilities: tuple[float, float]
    states: tuple[DensityMatrix | None, DensityMatrix | None]
    negativities: tuple[float, float]
    expected_negativity: float


def _reduced_layout(layout: HilbertLayout, keep: tuple[int, ...]) -> HilbertLayout:
    dims = tuple(layout.dims[k] for k in keep)
    if layout.picture is Picture.PHYSICAL and keep == (1, 2):
        return HilbertLayout.modes(layout.cutoff)
    return HilbertLayout.generic(dims)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on the subsystems in ``keep`` (kept in their original order)."""
    keep = tuple(sorted({int(k) for k in keep}))
    dims = rho.layout.dims
    if not keep or any(not 0 <= k < len(dims) for k in keep):
        raise LayoutError(f"invalid subsystems {keep} for dims {dims}")
    n = len(dims)
    tensor = rho.mat.reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    # einsum labels: ket indices 0..n-1, bra indices n..2n-1; traced bra = ket
    bra = [k if k in traced else n + k for k in range(n)]
    out_labels = list(keep) + [n + k for k in keep]
    reduced = np.einsum(tensor, list(range(n)) + bra, out_labels)
    d = int(np.prod([dims[k] for k in keep]))
    return DensityMatrix(_reduced_layout(rho.layout, keep), reduced.reshape(d, d))


def _two_mode_dims(rho) -> tuple[int, int]:
    if isinstance(rho, DensityMatrix):
        if len(rho.layout.dims) != 2 or rho.layout.picture in (
            Picture.PHYSICAL,
            Picture.EFFECTIVE,
        ):
            raise LayoutError("partial transpose needs a two-mode layout")
        return rho.layout.dims
    raise LayoutError("expected a DensityMatrix on a two-mode layout")


def partial_transpose(rho: DensityMatrix) -> np.ndarray:
    """Transpose on the second subsystem: ``out[(m,n),(m',n')] = rho[(m,n'),(m',n)]``."""
    da, db = _two_mode_dims(rho)
    t = rho.mat.reshape(da, db, da, db).transpose(0, 3, 2, 1)
    return t.reshape(da * db, da * db)


def negativity_from_spectrum(eigenvalues, base: float = LOG_BASE) -> NegativityResult:
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    trace_norm = float(np.sum(np.abs(eigenvalues)))
    if trace_norm <= 1.0 + ZERO_WINDOW:
        value = 0.0
    else:
        value = float(np.log(trace_norm) / np.log(base))
    return NegativityResult(value, float(eigenvalues.min()), trace_norm)


def log_negativity(rho: DensityMatrix, base: float = LOG_BASE) -> NegativityResult:
    """``log(||rho^T_B||_1)``; the trace norm is the sum of ``|eigenvalues|``."""
    pt = partial_transpose(rho)
    spectrum = numerics.hermitian_eigenvalues(pt)
    result = negativity_from_spectrum(spectrum.eigenvalues, base)
    if result.trace_norm < 1.0 - CLAMP_WINDOW:
        raise LayoutError(f"trace norm {result.trace_norm} < 1: state is not normalised")
    return result


def atom_measured_negativity(rho: DensityMatrix, base: float = LOG_BASE) -> MeasurementOutcome:
    """Expected cavity negativity after a projective measurement of the atom."""
    if rho.layout.picture is not Picture.PHYSICAL:
        raise LayoutError("atom measurement needs a physical-picture state")
    cutoff = rho.layout.cutoff
    m = (cutoff + 1) ** 2
    blocks = rho.mat.reshape(ATOM_DIM, m, ATOM_DIM, m)
    probs, states, negs = [], [], []
    for i in range(ATOM_DIM):
        block = blocks[i, :, i, :]
        p = float(np.trace(block).real)
        probs.append(p)
        if p < MIN_OUTCOME_PROBABILITY:
            states.append(None)
            negs.append(0.0)
            continue
        state = DensityMatrix(HilbertLayout.modes(cutoff), block / p)
        states.append(state)
        negs.append(log_negativity(state, base).value)
    total = sum(probs)
    probs = [p / total for p in probs]
    expected = sum(p * n for p, n in zip(probs, negs))
    return MeasurementOutcome(tuple(probs), tuple(states), tuple(negs), expected)


def traced_negativity(rho: DensityMatrix, base: float = LOG_BASE) -> NegativityResult:
    """Negativity between the cavity modes after tracing out the atom."""
    if rho.layout.picture is not Picture.PHYSICAL:
        raise LayoutError("expected a physical-picture state")
    return log_negativity(partial_trace(rho, (1, 2)), base)
