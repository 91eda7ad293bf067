import numpy as np
import pytest
from conftest import random_density

from cavityent.entanglement import (
    atom_measured_negativity,
    log_negativity,
    negativity_from_spectrum,
    partial_trace,
    partial_transpose,
    traced_negativity,
)
from cavityent.errors import LayoutError
from cavityent.model import (
    DensityMatrix,
    HilbertLayout,
    ModelParams,
    kappa0_physical_state,
)
from cavityent.validation import bell_pair, vacuum_triplet_mixture

MIXTURE_HALF = np.log2(1 + np.sqrt(0.5) - 0.5)  # 0.27155...


def _modes(mat, cutoff=1):
    return DensityMatrix(HilbertLayout.modes(cutoff), mat)


def _embed(block: np.ndarray, cutoff: int) -> np.ndarray:
    """Place a two-qubit operator on the 0/1 Fock subspace of two modes."""
    n = cutoff + 1
    out = np.zeros((n * n, n * n), dtype=complex)
    idx = [0, 1, n, n + 1]
    out[np.ix_(idx, idx)] = block
    return out


# -- partial trace ----------------------------------------------------------------


def test_partial_trace_product(rng):
    sigma, tau = random_density(2, rng), random_density(3, rng)
    rho = DensityMatrix(HilbertLayout.generic((2, 3)), np.kron(sigma, tau))
    np.testing.assert_allclose(partial_trace(rho, [1]).mat, tau, atol=1e-14)
    np.testing.assert_allclose(partial_trace(rho, [0]).mat, sigma, atol=1e-14)


def test_partial_trace_bell():
    np.testing.assert_allclose(partial_trace(bell_pair(), [0]).mat, np.eye(2) / 2, atol=1e-15)


def test_partial_trace_unit_trace(rng):
    layout = HilbertLayout.physical(2)
    rho = DensityMatrix(layout, random_density(layout.dim, rng))
    reduced = partial_trace(rho, (1, 2))
    assert reduced.layout == HilbertLayout.modes(2)
    assert reduced.trace().real == pytest.approx(1.0, abs=1e-12)


def test_partial_trace_invalid():
    with pytest.raises(LayoutError):
        partial_trace(bell_pair(), [])
    with pytest.raises(LayoutError):
        partial_trace(bell_pair(), [2])


# -- partial transpose --------------------------------------------------------------


def test_partial_transpose_diagonal():
    rho = _modes(np.diag([0.1, 0.2, 0.3, 0.4]))
    np.testing.assert_array_equal(partial_transpose(rho), rho.mat)


def test_partial_transpose_involution(rng):
    rho = _modes(random_density(9, rng), cutoff=2)
    twice = partial_transpose(_modes(partial_transpose(rho), cutoff=2))
    np.testing.assert_array_equal(twice, rho.mat)


def test_partial_transpose_index_rule(rng):
    rho = _modes(random_density(9, rng), cutoff=2)
    pt = partial_transpose(rho)
    for m, n, mp, np_ in [(0, 1, 2, 0), (1, 2, 0, 1), (2, 2, 1, 0)]:
        assert pt[m * 3 + n, mp * 3 + np_] == rho.mat[m * 3 + np_, mp * 3 + n]
    assert np.trace(pt).real == pytest.approx(1.0)
    np.testing.assert_allclose(pt, pt.conj().T, atol=1e-15)


def test_partial_transpose_bell_spectrum():
    vals = np.linalg.eigvalsh(partial_transpose(bell_pair()))
    np.testing.assert_allclose(vals, [-0.5, 0.5, 0.5, 0.5], atol=1e-15)


def test_partial_transpose_needs_two_modes():
    with pytest.raises(LayoutError):
        partial_transpose(DensityMatrix(HilbertLayout.effective(1), np.eye(4) / 4))


# -- negativity --------------------------------------------------------------------


def test_bell_negativity():
    result = log_negativity(bell_pair())
    assert result.value == pytest.approx(1.0, abs=1e-12)
    assert result.trace_norm == pytest.approx(2.0)
    assert result.min_pt_eigenvalue == pytest.approx(-0.5)


def test_half_mixture_negativity():
    assert MIXTURE_HALF == pytest.approx(0.27155, abs=1e-5)
    assert log_negativity(vacuum_triplet_mixture(0.5)).value == pytest.approx(MIXTURE_HALF, abs=1e-12)


@pytest.mark.parametrize("p", [0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
def test_vacuum_triplet_always_entangled(p):
    # closed form: the partial transpose has eigenvalue (1-p)/2 - sqrt((1-p)^2 + p^2)/2
    expected = np.log2(1 + np.sqrt((1 - p) ** 2 + p**2) - (1 - p))
    value = log_negativity(vacuum_triplet_mixture(p)).value
    assert value > 0
    assert value == pytest.approx(expected, abs=1e-12)


def test_negativity_natural_log():
    assert log_negativity(bell_pair(), base=np.e).value == pytest.approx(np.log(2.0))


def test_product_states_have_zero_negativity(rng):
    for cutoff in (1, 2):
        d = cutoff + 1
        rho = _modes(np.kron(random_density(d, rng), random_density(d, rng)), cutoff)
        assert log_negativity(rho).value == 0.0


def test_random_separable_mixtures(rng):
    for _ in range(100):
        k = rng.integers(1, 5)
        weights = rng.dirichlet(np.ones(k))
        mat = sum(w * np.kron(random_density(3, rng), random_density(3, rng)) for w in weights)
        result = log_negativity(_modes(mat, 2))
        assert result.value == 0.0


def test_zero_window():
    assert negativity_from_spectrum([1.0 + 5e-13, 0.0]).value == 0.0
    assert negativity_from_spectrum([0.75, 0.5, -0.25]).value == pytest.approx(np.log2(1.5))


def test_unnormalised_state_rejected():
    with pytest.raises(LayoutError):
        log_negativity(_modes(np.diag([0.5, 0.2, 0.1, 0.1])))


@pytest.mark.parametrize("n_t", [0.2, 0.5, 1.0, 2.0])
def test_kappa0_state_separable(n_t):
    rho = kappa0_physical_state(ModelParams(n_t=n_t), cutoff=6)
    assert traced_negativity(rho).value <= 1e-9


# -- atom measurement ---------------------------------------------------------------


def _with_atom(blocks, cutoff=1):
    layout = HilbertLayout.physical(cutoff)
    m = (cutoff + 1) ** 2
    mat = np.zeros((2 * m, 2 * m), dtype=complex)
    for i, block in enumerate(blocks):
        mat[i * m:(i + 1) * m, i * m:(i + 1) * m] = block
    return DensityMatrix(layout, mat)


def test_measurement_uncorrelated_atom(rng):
    tau = random_density(4, rng)
    outcome = atom_measured_negativity(_with_atom([tau, np.zeros((4, 4))]))
    assert outcome.probabilities == pytest.approx((1.0, 0.0))
    np.testing.assert_allclose(outcome.states[0].mat, tau, atol=1e-15)
    assert outcome.states[1] is None
    assert outcome.expected_negativity == pytest.approx(log_negativity(_modes(tau)).value)


def test_measurement_uncorrelated_atom_mixed(rng):
    tau = random_density(9, rng)
    outcome = atom_measured_negativity(_with_atom([0.3 * tau, 0.7 * tau], cutoff=2))
    np.testing.assert_allclose(outcome.states[0].mat, outcome.states[1].mat, atol=1e-14)
    assert outcome.expected_negativity == pytest.approx(log_negativity(_modes(tau, 2)).value)


def test_measurement_helps():
    vac = np.zeros((4, 4))
    vac[0, 0] = 1.0
    rho = _with_atom([0.5 * bell_pair().mat, 0.5 * vac])
    outcome = atom_measured_negativity(rho)
    assert outcome.probabilities == pytest.approx((0.5, 0.5))
    assert outcome.negativities == pytest.approx((1.0, 0.0))
    assert outcome.expected_negativity == pytest.approx(0.5)
    traced = traced_negativity(rho).value
    assert traced == pytest.approx(MIXTURE_HALF, abs=1e-12)
    assert traced < outcome.expected_negativity


def test_measurement_larger_cutoff_embedding():
    vac = np.zeros((9, 9))
    vac[0, 0] = 1.0
    rho = _with_atom([0.5 * _embed(bell_pair().mat, 2), 0.5 * vac], cutoff=2)
    assert atom_measured_negativity(rho).expected_negativity == pytest.approx(0.5)


def test_measurement_needs_physical_layout():
    with pytest.raises(LayoutError):
        atom_measured_negativity(bell_pair())
    with pytest.raises(LayoutError):
        traced_negativity(bell_pair())
