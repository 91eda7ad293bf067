"""Dense complex linear algebra kernel.

Conventions used by every other module:

* Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``,
  indexed row-major (C order).
* Density matrices are vectorised by stacking *columns*:
  ``vec(X) = X.reshape(-1, order="F")``, so that
  ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionOverflowError,
    LayoutError,
    NormOverflowError,
    NotHermitianError,
    SingularMatrixError,
)

#: Largest row (or column) count any dense object may reach.
MAX_DIM = 4096
#: Largest 1-norm accepted by :func:`matrix_exponential`.
MAX_EXPM_NORM = 1.0e5
HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending) and, optionally, eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.eigenvalues)


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise LayoutError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape((dim, dim), order="F")


def kron(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product with entry ``[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``."""
    a = as_matrix(a)
    b = as_matrix(b)
    ra, ca = a.shape
    rb, cb = b.shape
    if ra * rb > max_dim or ca * cb > max_dim:
        raise DimensionOverflowError(
            f"kron result {ra * rb}x{ca * cb} exceeds max_dim={max_dim}"
        )
    out = a[:, None, :, None] * b[None, :, None, :]
    return out.reshape(ra * rb, ca * cb)


def kron_all(*mats, max_dim: int = MAX_DIM) -> np.ndarray:
    out = as_matrix(mats[0])
    for m in mats[1:]:
        out = kron(out, m, max_dim=max_dim)
    return out


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermiticity_error(a: np.ndarray) -> float:
    return max_abs(a - a.conj().T)


def _components(a: np.ndarray, thresh: float) -> list[np.ndarray]:
    """Index sets of the connected components of the coupling graph of ``a``."""
    n = a.shape[0]
    adj = np.abs(a) > thresh
    seen = np.zeros(n, dtype=bool)
    blocks = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        members = []
        while stack:
            i = stack.pop()
            members.append(i)
            for j in np.flatnonzero(adj[i] & ~seen):
                seen[j] = True
                stack.append(int(j))
        blocks.append(np.array(sorted(members)))
    return blocks


def _jacobi(a: np.ndarray, thresh: float, max_sweeps: int, want_vectors: bool):
    """Cyclic complex Jacobi on a Hermitian matrix; works on a copy."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex) if want_vectors else None
    if n == 1:
        return a.diagonal().real.copy(), v
    iu = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        if np.max(np.abs(a[iu])) <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= thresh:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                phase = apq / mag
                theta = (aqq - app) / (2.0 * mag)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cph = phase.conjugate()
                # columns: A <- A U with U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - (s * cph) * col_q
                a[:, q] = s * col_p + (c * cph) * col_q
                # rows: A <- U^dagger A
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - (s * phase) * row_q
                a[q, :] = s * row_p + (c * phase) * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q]
                    v[:, p] = c * vp - (s * cph) * vq
                    v[:, q] = s * vp + (c * cph) * vq
    else:
        if np.max(np.abs(a[iu])) > thresh:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal max {np.max(np.abs(a[iu])):.3e})"
            )
    return a.diagonal().real.copy(), v


def hermitian_eigenvalues(
    a,
    tol: float = JACOBI_TOL,
    *,
    vectors: bool = False,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
    hermitian_tol: float = HERMITIAN_TOL,
) -> Spectrum:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Rotations are applied until every off-diagonal magnitude is at most
    ``tol * max(1, ||a||_max)``.  When only eigenvalues are requested the
    matrix is first split into decoupled diagonal blocks, which is exact and
    much cheaper for the block-sparse operators met in photon-number
    conserving problems.

    Raises
    ------
    NotHermitianError
        If ``a`` deviates from its adjoint by more than ``hermitian_tol``.
    ConvergenceError
        If ``max_sweeps`` sweeps do not reach the threshold.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise LayoutError(f"matrix must be square, got {a.shape}")
    if hermiticity_error(a) > hermitian_tol:
        raise NotHermitianError(
            f"matrix is not Hermitian (deviation {hermiticity_error(a):.3e})"
        )
    if n == 0:
        return Spectrum(np.zeros(0), np.zeros((0, 0), complex) if vectors else None)
    a = 0.5 * (a + a.conj().T)
    thresh = tol * max(1.0, max_abs(a))

    if vectors:
        w, v = _jacobi(a, thresh, max_sweeps, True)
        order = np.argsort(w, kind="stable")
        return Spectrum(w[order], v[:, order])

    evals = []
    for idx in _components(a, thresh):
        w, _ = _jacobi(a[np.ix_(idx, idx)], thresh, max_sweeps, False)
        evals.append(w)
    return Spectrum(np.sort(np.concatenate(evals)))


def lu_factor(a: np.ndarray, pivot_tol: float = 1e-13):
    """LU factors (packed, unit lower) and row permutation with partial pivoting."""
    lu = np.array(a, dtype=complex)
    n = lu.shape[0]
    perm = np.arange(n)
    scale = max_abs(a)
    floor = pivot_tol * scale
    for k in range(n):
        r = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = lu[r, k]
        if abs(pivot) < floor or scale == 0.0:
            raise SingularMatrixError(
                f"pivot {abs(pivot):.3e} at step {k} below {floor:.3e}"
            )
        if r != k:
            lu[[k, r]] = lu[[r, k]]
            perm[[k, r]] = perm[[r, k]]
        lu[k + 1 :, k] /= pivot
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, perm


def lu_solve(lu: np.ndarray, perm: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = lu.shape[0]
    y = np.array(b[perm], dtype=complex)
    for k in range(n):
        y[k + 1 :] -= np.multiply.outer(lu[k + 1 :, k], y[k])
    for k in range(n - 1, -1, -1):
        y[k] /= lu[k, k]
        y[:k] -= np.multiply.outer(lu[:k, k], y[k])
    return y


def solve_linear(a, b, pivot_tol: float = 1e-13) -> np.ndarray:
    """Solve ``a @ x = b`` by LU with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides.  One step of
    iterative refinement is applied.

    Raises
    ------
    SingularMatrixError
        When a pivot falls below ``pivot_tol * ||a||_max``.
    """
    a = as_matrix(a)
    b = np.asarray(b, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape[0] != n:
        raise LayoutError(f"incompatible shapes {a.shape} and {b.shape}")
    lu, perm = lu_factor(a, pivot_tol)
    x = lu_solve(lu, perm, b)
    x += lu_solve(lu, perm, b - a @ x)
    return x


# Pade coefficients for exp, degrees 3..13, and the 1-norm thresholds below
# which each degree meets double-precision accuracy.
_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (
        17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0,
    ),
    13: (
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
        16380.0, 182.0, 1.0,
    ),
}
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade_terms(a: np.ndarray, degree: int):
    b = _PADE[degree]
    ident = np.eye(a.shape[0], dtype=complex)
    a2 = a @ a
    if degree < 13:
        powers = [ident, a2]
        while len(powers) < (degree + 1) // 2:
            powers.append(powers[-1] @ a2)
        u = a @ sum(b[2 * k + 1] * powers[k] for k in range(len(powers)))
        v = sum(b[2 * k] * powers[k] for k in range(len(powers)))
        return u, v
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (
        a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
        + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident
    )
    v = (
        a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
        + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    )
    return u, v


def matrix_exponential(a, max_norm: float = MAX_EXPM_NORM) -> np.ndarray:
    """``exp(a)`` by scaling and squaring around a diagonal Pade approximant."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise LayoutError(f"matrix must be square, got {a.shape}")
    norm = float(np.max(np.sum(np.abs(a), axis=0))) if a.size else 0.0
    if not np.isfinite(norm) or norm > max_norm:
        raise NormOverflowError(f"1-norm {norm:.3e} exceeds bound {max_norm:.3e}")

    squarings = 0
    for degree in (3, 5, 7, 9):
        if norm <= _THETA[degree]:
            break
    else:
        degree = 13
        if norm > _THETA[13]:
            squarings = int(np.ceil(np.log2(norm / _THETA[13])))
    scaled = a / 2.0**squarings
    u, v = _pade_terms(scaled, degree)
    result = solve_linear(v - u, v + u)
    for _ in range(squarings):
        result = result @ result
    return result
