"""Hilbert-space layouts, operators and generators of the atom + two cavity model.

Two pictures are supported:

* ``physical``: atom (x) mode a (x) mode b, each mode truncated at ``cutoff``
  photons.
* ``effective``: atom (x) mode c, where ``c = (g_a a + g_b b) / g`` is the only
  cavity combination the atom couples to.  The orthogonal mode d is never
  populated from vacuum and is dropped, so ``cutoff`` bounds the total photon
  number in a + b.

Atom basis order is ``(|1>, |2>)`` with ``|1>`` the ground state.  All
Hamiltonians are in the interaction picture with respect to the free
evolution at the common frequency.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import lru_cache
from math import comb, prod, sqrt

import numpy as np

from . import numerics
from .errors import InvalidStateError, LayoutError


class Picture(str, enum.Enum):
    PHYSICAL = "physical"
    EFFECTIVE = "effective"
    MODES = "modes"  # two cavity modes a (x) b, atom removed
    GENERIC = "generic"


ATOM_DIM = 2
GROUND, EXCITED = 0, 1


@dataclass(frozen=True)
class HilbertLayout:
    """Ordered subsystem dimensions; basis index is row-major, first subsystem slowest."""

    picture: Picture
    dims: tuple[int, ...]
    cutoff: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "picture", Picture(self.picture))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims or any(d < 1 for d in self.dims):
            raise LayoutError(f"invalid dims {self.dims}")
        if self.picture in (Picture.PHYSICAL, Picture.EFFECTIVE):
            if self.dims[0] != ATOM_DIM:
                raise LayoutError("atom subsystem must have dimension 2")
            if self.cutoff is None or self.cutoff < 1:
                raise LayoutError("cutoff must be >= 1")
            n = self.cutoff + 1
            expected = (2, n, n) if self.picture is Picture.PHYSICAL else (2, n)
            if self.dims != expected:
                raise LayoutError(f"{self.picture.value} dims must be {expected}")

    @classmethod
    def physical(cls, cutoff: int) -> HilbertLayout:
        return cls(Picture.PHYSICAL, (2, cutoff + 1, cutoff + 1), cutoff)

    @classmethod
    def effective(cls, cutoff: int) -> HilbertLayout:
        return cls(Picture.EFFECTIVE, (2, cutoff + 1), cutoff)

    @classmethod
    def modes(cls, cutoff: int) -> HilbertLayout:
        return cls(Picture.MODES, (cutoff + 1, cutoff + 1), cutoff)

    @classmethod
    def generic(cls, dims) -> HilbertLayout:
        return cls(Picture.GENERIC, tuple(dims))

    @property
    def dim(self) -> int:
        return prod(self.dims)

    @property
    def strides(self) -> tuple[int, ...]:
        out = []
        acc = 1
        for d in reversed(self.dims):
            out.append(acc)
            acc *= d
        return tuple(reversed(out))

    def index(self, *labels: int) -> int:
        """Flattened basis index of the product state with the given labels."""
        if len(labels) != len(self.dims):
            raise LayoutError(f"need {len(self.dims)} labels, got {len(labels)}")
        for lab, d in zip(labels, self.dims):
            if not 0 <= lab < d:
                raise LayoutError(f"label {lab} out of range for dimension {d}")
        return sum(lab * s for lab, s in zip(labels, self.strides))


@dataclass(frozen=True)
class ModelParams:
    """Physical constants (hbar = 1, rates in units where g_a = g_b = 1 by default)."""

    g_a: float = 1.0
    g_b: float = 1.0
    kappa_a: float = 1.0
    kappa_b: float = 1.0
    gamma: float = 0.2
    n_t: float = 1.0
    cutoff: int = 3

    def __post_init__(self):
        for name in ("g_a", "g_b", "kappa_a", "kappa_b", "gamma", "n_t"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
        if self.g_a**2 + self.g_b**2 <= 0:
            raise ValueError("at least one coupling must be nonzero")
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise ValueError(f"cutoff must be an integer >= 1, got {self.cutoff}")

    @property
    def g(self) -> float:
        return sqrt(self.g_a**2 + self.g_b**2)

    @property
    def symmetric_decay(self) -> bool:
        return self.kappa_a == self.kappa_b

    @property
    def kappa(self) -> float:
        if not self.symmetric_decay:
            raise ValueError("effective picture requires kappa_a == kappa_b")
        return self.kappa_a

    def with_kappa(self, kappa: float) -> ModelParams:
        return replace(self, kappa_a=kappa, kappa_b=kappa)

    def replace(self, **changes) -> ModelParams:
        return replace(self, **changes)

    def layout(self, picture: Picture | str = Picture.EFFECTIVE) -> HilbertLayout:
        picture = Picture(picture)
        if picture is Picture.EFFECTIVE:
            self.kappa  # raises on asymmetric decay
            return HilbertLayout.effective(self.cutoff)
        if picture is Picture.PHYSICAL:
            return HilbertLayout.physical(self.cutoff)
        raise LayoutError(f"no model layout for picture {picture.value}")


@dataclass(frozen=True)
class DensityMatrix:
    layout: HilbertLayout
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        d = self.layout.dim
        if mat.shape != (d, d):
            raise LayoutError(f"matrix shape {mat.shape} does not match layout dim {d}")
        if not np.all(np.isfinite(mat)):
            raise InvalidStateError("density matrix has non-finite entries")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @classmethod
    def from_ket(cls, layout: HilbertLayout, ket) -> DensityMatrix:
        ket = np.asarray(ket, dtype=complex)
        ket = ket / np.linalg.norm(ket)
        return cls(layout, np.outer(ket, ket.conj()))

    @classmethod
    def basis(cls, layout: HilbertLayout, *labels: int) -> DensityMatrix:
        ket = np.zeros(layout.dim, complex)
        ket[layout.index(*labels)] = 1.0
        return cls.from_ket(layout, ket)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def min_eigenvalue(self) -> float:
        return float(numerics.hermitian_eigenvalues(self.mat).eigenvalues[0])

    def validate(
        self,
        hermitian_tol: float = 1e-10,
        trace_tol: float = 1e-8,
        positivity_tol: float = 1e-8,
    ) -> DensityMatrix:
        """Raise :class:`InvalidStateError` unless the state is physical."""
        herm = numerics.hermiticity_error(self.mat)
        if herm > hermitian_tol:
            raise InvalidStateError(f"not Hermitian (deviation {herm:.3e})")
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise InvalidStateError(f"trace {tr} differs from 1")
        lam = self.min_eigenvalue()
        if lam < -positivity_tol:
            raise InvalidStateError(f"negative eigenvalue {lam:.3e}")
        return self


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def annihilation(dim: int) -> np.ndarray:
    """Truncated annihilation operator, ``<n-1|a|n> = sqrt(n)``."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


@lru_cache(maxsize=128)
def _lowering(layout: HilbertLayout, subsystem: int) -> np.ndarray:
    factors = [np.eye(d, dtype=complex) for d in layout.dims]
    # for dimension 2 this is |1><2|, the atomic lowering operator
    factors[subsystem] = annihilation(layout.dims[subsystem])
    return _readonly(numerics.kron_all(*factors))


def lowering_operator(layout: HilbertLayout, subsystem: int) -> np.ndarray:
    """Lowering operator of one subsystem, embedded with identities elsewhere."""
    if not 0 <= subsystem < len(layout.dims):
        raise LayoutError(f"subsystem {subsystem} invalid for dims {layout.dims}")
    return _lowering(layout, subsystem)


def _require(layout: HilbertLayout, picture: Picture) -> None:
    if layout.picture is not picture:
        raise LayoutError(f"expected {picture.value} layout, got {layout.picture.value}")


def _jc_term(sigma_minus: np.ndarray, mode: np.ndarray) -> np.ndarray:
    # sigma+ m + sigma- m^dagger
    term = sigma_minus.conj().T @ mode
    return term + term.conj().T


@lru_cache(maxsize=128)
def hamiltonian_physical(params: ModelParams, layout: HilbertLayout) -> np.ndarray:
    """``g_a (s+ a + s- a^dag) + g_b (s+ b + s- b^dag)``."""
    _require(layout, Picture.PHYSICAL)
    sm = lowering_operator(layout, 0)
    h = params.g_a * _jc_term(sm, lowering_operator(layout, 1))
    h = h + params.g_b * _jc_term(sm, lowering_operator(layout, 2))
    return _readonly(h)


@lru_cache(maxsize=128)
def hamiltonian_effective(params: ModelParams, layout: HilbertLayout) -> np.ndarray:
    """``g (c s+ + c^dag s-)`` with ``g = sqrt(g_a^2 + g_b^2)``."""
    _require(layout, Picture.EFFECTIVE)
    sm = lowering_operator(layout, 0)
    return _readonly(params.g * _jc_term(sm, lowering_operator(layout, 1)))


def hamiltonian(params: ModelParams, layout: HilbertLayout) -> np.ndarray:
    if layout.picture is Picture.PHYSICAL:
        return hamiltonian_physical(params, layout)
    if layout.picture is Picture.EFFECTIVE:
        return hamiltonian_effective(params, layout)
    raise LayoutError(f"no Hamiltonian for picture {layout.picture.value}")


def dissipators(params: ModelParams, layout: HilbertLayout) -> list[tuple[float, np.ndarray]]:
    """``(rate, L)`` pairs; each contributes ``-rate (L^dag L rho + rho L^dag L - 2 L rho L^dag)``."""
    sm = lowering_operator(layout, 0)
    if layout.picture is Picture.PHYSICAL:
        terms = [
            (params.kappa_a, lowering_operator(layout, 1)),
            (params.kappa_b, lowering_operator(layout, 2)),
        ]
    elif layout.picture is Picture.EFFECTIVE:
        terms = [(params.kappa, lowering_operator(layout, 1))]
    else:
        raise LayoutError(f"no dissipator for picture {layout.picture.value}")
    terms.append(((params.n_t + 1.0) * params.gamma, sm))
    terms.append((params.n_t * params.gamma, _readonly(sm.conj().T.copy())))
    return [(rate, op) for rate, op in terms if rate > 0]


def _matrix_of(rho, layout: HilbertLayout) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        if rho.layout != layout:
            raise LayoutError("state layout does not match the generator layout")
        return rho.mat
    mat = np.asarray(rho, dtype=complex)
    if mat.shape != (layout.dim, layout.dim):
        raise LayoutError(f"matrix shape {mat.shape} does not match layout dim {layout.dim}")
    return mat


def liouvillian_apply(params: ModelParams, layout: HilbertLayout, rho) -> np.ndarray:
    """Right-hand side of the master equation, ``-i[H, rho] + L(rho)``."""
    mat = _matrix_of(rho, layout)
    h = hamiltonian(params, layout)
    out = -1j * (h @ mat - mat @ h)
    for rate, op in dissipators(params, layout):
        opd = op.conj().T
        n_op = opd @ op
        out -= rate * (n_op @ mat + mat @ n_op - 2.0 * op @ mat @ opd)
    return out


def kappa0_stationary_state(n_t: float, cutoff: int) -> DensityMatrix:
    """Stationary state of the lossless-cavity problem in the effective picture.

    Populations ``(n/(1+n))**(r+i-1) / (2n+1)`` on ``|i> (x) |r>_c`` (with
    i = 1, 2), truncated at ``r <= cutoff`` and renormalised.
    """
    if n_t < 0:
        raise ValueError("n_t must be >= 0")
    layout = HilbertLayout.effective(cutoff)
    x = n_t / (1.0 + n_t)
    diag = np.zeros(layout.dim)
    for i in (GROUND, EXCITED):
        for r in range(cutoff + 1):
            diag[layout.index(i, r)] = x ** (r + i) / (2.0 * n_t + 1.0)
    diag /= diag.sum()
    return DensityMatrix(layout, np.diag(diag).astype(complex))


@lru_cache(maxsize=64)
def mode_isometry(g_a: float, g_b: float, cutoff: int, per_mode: int | None = None) -> np.ndarray:
    """Columns ``|r>_c`` expressed on ``|k>_a |r-k>_b``.

    Shape is ``((M+1)^2, N+1)`` with ``N = cutoff`` and ``M = per_mode``
    (default ``N``).  With ``M < N`` components having more than ``M`` photons
    in either mode are dropped, so the map is no longer an isometry.
    """
    per_mode = cutoff if per_mode is None else per_mode
    g = sqrt(g_a**2 + g_b**2)
    alpha, beta = g_a / g, g_b / g
    n = per_mode + 1
    w = np.zeros((n * n, cutoff + 1), dtype=complex)
    for r in range(cutoff + 1):
        for k in range(max(0, r - per_mode), min(r, per_mode) + 1):
            w[k * n + (r - k), r] = sqrt(comb(r, k)) * alpha**k * beta ** (r - k)
    return _readonly(w)


def effective_to_physical(
    rho_eff: DensityMatrix, params: ModelParams, cutoff: int | None = None
) -> DensityMatrix:
    """Map an effective-picture state (mode d in vacuum) to the physical picture.

    ``cutoff`` is the per-mode cutoff of the result and defaults to the
    effective cutoff, in which case the map is exact.  A smaller value
    projects each mode locally onto its first ``cutoff + 1`` Fock states and
    renormalises; a local projection cannot create entanglement.
    """
    _require(rho_eff.layout, Picture.EFFECTIVE)
    n_eff = rho_eff.layout.cutoff
    per_mode = n_eff if cutoff is None else int(cutoff)
    if not 1 <= per_mode <= n_eff:
        raise LayoutError(f"per-mode cutoff must lie in [1, {n_eff}], got {per_mode}")
    w = mode_isometry(params.g_a, params.g_b, n_eff, per_mode)
    v = numerics.kron(np.eye(ATOM_DIM), w)
    mat = v @ rho_eff.mat @ v.conj().T
    if per_mode < n_eff:
        mat = mat / np.trace(mat).real
    return DensityMatrix(HilbertLayout.physical(per_mode), mat)


def kappa0_physical_state(params: ModelParams, cutoff: int | None = None) -> DensityMatrix:
    """Lossless-cavity stationary state on atom (x) a (x) b with per-mode cutoff.

    Every effective-mode term that has a component inside the per-mode box
    (``r <= 2 * cutoff``) is kept before the local projection, so the result
    is the exact stationary state restricted to at most ``cutoff`` photons per
    mode.
    """
    cutoff = params.cutoff if cutoff is None else cutoff
    rho_eff = kappa0_stationary_state(params.n_t, 2 * cutoff)
    return effective_to_physical(rho_eff, params, cutoff)


def excitation_numbers(layout: HilbertLayout) -> np.ndarray:
    """Atomic excitation plus photon number for every basis state.

    The generator conserves the difference of this quantity between ket and
    bra, so a unique steady state has no coherences between different values.
    """
    if layout.picture not in (Picture.PHYSICAL, Picture.EFFECTIVE):
        raise LayoutError(f"no excitation number for picture {layout.picture.value}")
    grids = np.meshgrid(*[np.arange(d) for d in layout.dims], indexing="ij")
    return sum(grids).reshape(-1)


def mode_populations(rho: DensityMatrix) -> np.ndarray:
    """Photon-number distribution of the cavity mode of an effective-picture state."""
    _require(rho.layout, Picture.EFFECTIVE)
    n = rho.layout.cutoff + 1
    diag = rho.mat.diagonal().real.reshape(ATOM_DIM, n)
    return diag.sum(axis=0)


def ground_vacuum(layout: HilbertLayout) -> DensityMatrix:
    """Atom in ``|1>`` and every cavity mode empty."""
    return DensityMatrix.basis(layout, *([0] * len(layout.dims)))
