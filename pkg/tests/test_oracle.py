"""Cross-checks against a from-scratch physical-picture model built with numpy and scipy."""

import numpy as np
import pytest
import scipy.linalg

from cavityent.dynamics import evolve, solve_steady_state
from cavityent.entanglement import traced_negativity
from cavityent.model import ModelParams, effective_to_physical, ground_vacuum


def _reference_generator(params: ModelParams) -> tuple[np.ndarray, int]:
    n = params.cutoff + 1
    a1 = np.diag(np.sqrt(np.arange(1, n)), 1)
    sm = np.array([[0.0, 1.0], [0.0, 0.0]])
    i2, i_n = np.eye(2), np.eye(n)
    s = np.kron(np.kron(sm, i_n), i_n)
    a = np.kron(np.kron(i2, a1), i_n)
    b = np.kron(np.kron(i2, i_n), a1)
    h = params.g_a * (s.T @ a + a.T @ s) + params.g_b * (s.T @ b + b.T @ s)
    d = h.shape[0]
    eye = np.eye(d)
    gen = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for rate, op in [
        (params.kappa_a, a),
        (params.kappa_b, b),
        ((params.n_t + 1) * params.gamma, s),
        (params.n_t * params.gamma, s.T),
    ]:
        n_op = op.T @ op
        gen += rate * (2 * np.kron(op.conj(), op) - np.kron(eye, n_op) - np.kron(n_op.T, eye))
    return gen, d


def _reference_negativity(rho: np.ndarray, n: int) -> float:
    blocks = rho.reshape(2, n * n, 2, n * n)
    modes = blocks[0, :, 0, :] + blocks[1, :, 1, :]
    pt = modes.reshape(n, n, n, n).transpose(0, 3, 2, 1).reshape(n * n, n * n)
    return float(np.log2(np.abs(np.linalg.eigvalsh(pt)).sum()))


@pytest.mark.parametrize("n_t, kappa", [(1.0, 1.0), (2.1125, 0.8818)])
def test_steady_state_against_null_space(n_t, kappa):
    params = ModelParams(gamma=0.2, n_t=n_t, cutoff=4).with_kappa(kappa)
    gen, d = _reference_generator(params)
    kernel = scipy.linalg.null_space(gen, rcond=1e-10)
    # the dark mode d makes the truncated physical kernel unique only when kappa > 0
    assert kernel.shape[1] == 1
    ref = kernel[:, 0].reshape(d, d, order="F")
    ref /= np.trace(ref)

    ours = solve_steady_state(params, params.layout(), sector=True).state
    phys = effective_to_physical(ours, params)
    # effective cutoff bounds the total photon number, the reference the per-mode
    # number; the two truncations differ only by the tiny top-level populations
    np.testing.assert_allclose(phys.mat, ref, atol=1e-6)
    assert traced_negativity(phys).value == pytest.approx(_reference_negativity(ref, 5), abs=1e-6)


def test_evolution_against_expm():
    params = ModelParams(gamma=0.2, n_t=0.5, cutoff=2).with_kappa(2.0)
    gen, d = _reference_generator(params)
    layout = params.layout("physical")
    rho0 = ground_vacuum(layout)
    ref = (scipy.linalg.expm(gen * 3.0) @ rho0.mat.reshape(-1, order="F")).reshape(d, d, order="F")
    ours = evolve(params, layout, rho0, 3.0)
    np.testing.assert_allclose(ours.mat, ref, atol=1e-8)
