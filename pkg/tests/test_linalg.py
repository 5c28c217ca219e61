import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import stats

from spinbattery.errors import InvalidArgumentError
from spinbattery.linalg import (
    I2,
    I4,
    SIGMA_Z,
    eig_hermitian,
    haar_random_unitary,
    is_hermitian,
    kron,
    matrix_sqrt_psd,
    partial_trace,
    trace_norm,
    trace_norm_hermitian,
)
from spinbattery.model import REFERENCE, build_hamiltonian, dimer_spectrum


def random_hermitian(rng, n=4, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (a + a.conj().T) / 2


def test_eig_identity_and_sigma_z():
    assert_allclose(eig_hermitian(I4).eigenvalues, np.ones(4))
    assert_allclose(eig_hermitian(kron(SIGMA_Z, I2)).eigenvalues, [-1, -1, 1, 1])


def test_eig_matches_analytic_dimer_levels():
    h = build_hamiltonian(REFERENCE, shift_to_singlet=True)
    got = eig_hermitian(h).eigenvalues
    assert_allclose(got, dimer_spectrum(REFERENCE).eigenvalues, rtol=0, atol=1e-12 * REFERENCE.J)


def test_eig_rejects_non_hermitian():
    with pytest.raises(InvalidArgumentError):
        eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


def test_eig_reconstruction_bound_on_many_matrices():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(10_000):
        m = random_hermitian(rng)
        s = eig_hermitian(m)
        assert np.all(np.diff(s.eigenvalues) >= 0)
        res = np.abs(m @ s.eigenvectors - s.eigenvectors * s.eigenvalues).max()
        worst = max(worst, res / np.abs(m).max())
    assert worst <= 1e-12


def test_eig_scale_invariant_hermiticity_check():
    rng = np.random.default_rng(1)
    m = random_hermitian(rng, scale=1e-20)
    assert is_hermitian(m)
    eig_hermitian(m)


def test_trace_norm_basic():
    assert_allclose(trace_norm(np.diag([1.0, -1.0, 0.0, 0.0])), 2.0)
    a = np.zeros(4)
    a[0] = 1
    b = np.zeros(4)
    b[3] = 1
    assert_allclose(trace_norm(np.outer(a, a) - np.outer(b, b)), 2.0)
    with pytest.raises(InvalidArgumentError):
        trace_norm(np.zeros((2, 3)))


def test_trace_norm_properties():
    rng = np.random.default_rng(3)
    for _ in range(200):
        a, b = random_hermitian(rng), random_hermitian(rng)
        assert_allclose(trace_norm(a), np.abs(np.linalg.eigvalsh(a)).sum(), rtol=1e-12)
        assert_allclose(trace_norm_hermitian(a), trace_norm(a), rtol=1e-12)
        assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10
        assert trace_norm(a) >= abs(np.trace(a)) - 1e-12
        u = haar_random_unitary(4, seed=rng)
        assert_allclose(trace_norm(u @ a @ u.conj().T), trace_norm(a), rtol=1e-10)


def test_matrix_sqrt_psd():
    assert_allclose(matrix_sqrt_psd(I4), I4)
    assert_allclose(matrix_sqrt_psd(np.diag([4.0, 1.0, 0.0, 0.0])), np.diag([2.0, 1.0, 0.0, 0.0]), atol=1e-15)
    clamped = matrix_sqrt_psd(np.diag([1.0, -5e-11, 0.0, 0.0]))
    assert np.all(np.linalg.eigvalsh(clamped) >= 0)
    with pytest.raises(InvalidArgumentError):
        matrix_sqrt_psd(np.diag([1.0, -1e-9, 0.0, 0.0]))


def test_matrix_sqrt_of_thermal_state():
    from spinbattery.thermal import gibbs_matrix

    rho = gibbs_matrix(REFERENCE, 293.0)
    s = matrix_sqrt_psd(rho)
    assert_allclose(s @ s, rho, atol=1e-11)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matrix_sqrt_psd_random(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = a @ a.conj().T
    m /= np.trace(m).real
    s = matrix_sqrt_psd(m)
    assert_allclose(s @ s, m, atol=1e-11)


def test_partial_trace_of_product():
    rng = np.random.default_rng(5)
    a = random_hermitian(rng, 2) + 3 * I2
    b = random_hermitian(rng, 2) + 3 * I2
    a /= np.trace(a)
    b /= np.trace(b)
    assert_allclose(partial_trace(np.kron(a, b), 0), a, atol=1e-14)
    assert_allclose(partial_trace(np.kron(a, b), 1), b, atol=1e-14)


@pytest.mark.parametrize("dim", [2, 4])
def test_haar_unitarity_and_determinism(dim):
    u = haar_random_unitary(dim, seed=42)
    assert np.abs(u.conj().T @ u - np.eye(dim)).max() <= 1e-12
    assert_allclose(haar_random_unitary(dim, seed=42), u, rtol=0, atol=0)
    stack = haar_random_unitary(dim, seed=1, size=100)
    err = np.abs(np.swapaxes(stack.conj(), -1, -2) @ stack - np.eye(dim)).max()
    assert err <= 1e-12


def test_haar_rejects_bad_dim():
    with pytest.raises(InvalidArgumentError):
        haar_random_unitary(3, seed=0)


def _phase_cdf_haar_u2(theta):
    # eigenphase marginal of Haar U(2): density (1 - cos(theta))/(2 pi) -- see below
    return (theta - np.sin(theta)) / (2 * np.pi)


def test_haar_eigenphases_ks():
    """Eigenphases of Haar U(2) are jointly |e^{i a} - e^{i b}|^2-repelled.

    A uniformly random phase (e.g. the first eigenphase after a random
    relabelling) is uniform on the circle by rotation invariance; the phase
    differences follow the Weyl density ``(1 - cos d)/(2 pi)``.
    """
    us = haar_random_unitary(2, seed=2024, size=10_000)
    ph = np.angle(np.linalg.eigvals(us))
    rng = np.random.default_rng(0)
    pick = ph[np.arange(len(ph)), rng.integers(0, 2, len(ph))]
    assert stats.kstest((pick + np.pi) / (2 * np.pi), "uniform").pvalue > 0.01
    d = np.mod(ph[:, 0] - ph[:, 1], 2 * np.pi)
    assert stats.kstest(d, _phase_cdf_haar_u2).pvalue > 0.01


def test_haar_left_invariance_ks():
    """``V U`` for fixed ``V`` has the same distribution of ``|U_00|^2`` (uniform for U(2))."""
    rng = np.random.default_rng(9)
    v = haar_random_unitary(2, seed=rng)
    us = haar_random_unitary(2, seed=11, size=10_000)
    a = np.abs(us[:, 0, 0]) ** 2
    b = np.abs((v @ us)[:, 0, 0]) ** 2
    assert stats.kstest(a, "uniform").pvalue > 0.01
    assert stats.kstest(b, "uniform").pvalue > 0.01
    assert stats.ks_2samp(a, b).pvalue > 0.01
