import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import oracles
from spinbattery.errors import DataInconsistencyError, InvalidArgumentError
from spinbattery.ergotropy import (
    ErgotropyRangeWarning,
    ergotropy_closed_form,
    ergotropy_from_susceptibility,
    ergotropy_general,
    ergotropy_random_unitary_bound,
    ergotropy_susceptibility_regime,
    in_susceptibility_regime,
    passive_energy,
)
from spinbattery.linalg import haar_random_unitary
from spinbattery.magnetometry import bleaney_bowers
from spinbattery.model import REFERENCE, DimerParams, crossing_field, self_hamiltonian
from spinbattery.thermal import gibbs_matrix

H0 = self_hamiltonian(REFERENCE)
SINGLET = np.outer([0, -1, 1, 0], [0, -1, 1, 0]) / 2


def random_state(rng, rank=4):
    a = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    m = a @ a.conj().T
    return m / np.trace(m).real


def test_passive_energy_against_all_pairings():
    rng = np.random.default_rng(11)
    for _ in range(200):
        rho = random_state(rng)
        ref = oracles.ergotropy_bruteforce(rho, H0)
        assert_allclose(ergotropy_general(rho, H0), ref, rtol=1e-9, atol=1e-12 * REFERENCE.E0)
        u0 = np.real(np.trace(rho @ H0))
        assert_allclose(u0 - passive_energy(rho, H0), ref, rtol=1e-9, atol=1e-12 * REFERENCE.E0)


def test_passive_state_has_no_ergotropy():
    rho = np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex)  # descending on ascending H0 = diag(E0,0,0,-E0)
    assert abs(ergotropy_general(rho, H0)) < 1e-15 * REFERENCE.E0


def test_pure_states():
    # singlet: Tr = 0, passive = -E0
    assert_allclose(ergotropy_general(SINGLET, H0), REFERENCE.E0, rtol=1e-12)
    uu = np.zeros((4, 4))
    uu[0, 0] = 1
    assert_allclose(ergotropy_general(uu, H0), 2 * REFERENCE.E0, rtol=1e-12)


def test_reference_values():
    p = REFERENCE
    assert_allclose(ergotropy_closed_form(p, 293.0).normalized_to_thermal_max, 0.747544, atol=1e-6)
    assert_allclose(ergotropy_closed_form(p, 100.0).normalized_to_thermal_max, 0.99774678, atol=1e-8)
    assert_allclose(ergotropy_closed_form(p, 83.0).normalized_to_thermal_max, 0.99951245, atol=1e-8)
    assert_allclose(ergotropy_closed_form(p, 1.0).per_mole, 1.11699e-3, rtol=1e-5)
    r = ergotropy_closed_form(p, 293.0)
    assert_allclose(r.normalized_to_2E0, r.normalized_to_thermal_max / 2)


@pytest.mark.parametrize("jk,b", [(748.0, 1e-4), (748.0, 300.0), (100.0, 300.0), (50.0, 74.42), (10.0, 200.0)])
@pytest.mark.parametrize("T", [2.0, 30.0, 293.0, 1000.0])
def test_closed_form_matches_spectral_and_literature(jk, b, T):
    p = DimerParams.from_kelvin(jk, 2.0, b)
    e = ergotropy_closed_form(p, T).per_molecule
    assert_allclose(e, ergotropy_general(gibbs_matrix(p, T), self_hamiltonian(p)), rtol=1e-9)
    assert_allclose(e, oracles.ergotropy_literature(p.J, p.E0, T), rtol=1e-9)
    rho = oracles.gibbs_expm(p.J, p.E0, T)
    assert_allclose(e, oracles.ergotropy_bruteforce(rho, oracles.h0(p.E0)), rtol=1e-8)


def test_closed_form_no_overflow_at_extremes():
    p = REFERENCE.with_field(5000.0)
    r = ergotropy_closed_form(p, 0.01)
    assert_allclose(r.per_molecule, 2 * p.E0, rtol=1e-12)
    assert ergotropy_closed_form(REFERENCE, 1e-3).normalized_to_thermal_max == pytest.approx(1.0, abs=1e-15)


def test_zero_field_has_no_ergotropy():
    r = ergotropy_closed_form(REFERENCE.with_field(0.0), 293.0)
    assert r.per_molecule == 0.0
    assert r.normalized_to_thermal_max == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 3000.0), st.floats(0.0, 3000.0), st.floats(0.5, 3000.0))
def test_closed_form_bounded(jk, b, T):
    p = DimerParams.from_kelvin(jk, 2.0, b)
    with warnings.catch_warnings():
        warnings.simplefilter("error", ErgotropyRangeWarning)
        e = ergotropy_closed_form(p, T).per_molecule
    assert 0.0 <= e <= 2 * p.E0


def test_haar_bound_below_true_ergotropy_and_deterministic():
    rng = np.random.default_rng(4)
    rho = random_state(rng, rank=2)
    true = ergotropy_general(rho, H0)
    b1 = ergotropy_random_unitary_bound(rho, H0, 2000, seed=3)
    b2 = ergotropy_random_unitary_bound(rho, H0, 2000, seed=3)
    assert b1 == b2
    assert b1 <= true + 1e-12 * REFERENCE.E0
    assert b1 > 0.5 * true


def test_haar_bound_polish_reaches_ergotropy():
    b = ergotropy_random_unitary_bound(SINGLET, H0, 500, seed=0, polish=True)
    assert b <= REFERENCE.E0 * (1 + 1e-12)
    assert_allclose(b, REFERENCE.E0, rtol=1e-8)


def test_haar_bound_rejects_zero_samples():
    with pytest.raises(InvalidArgumentError):
        ergotropy_random_unitary_bound(SINGLET, H0, 0, seed=0)


def test_ergotropy_invariant_under_commuting_unitary():
    # rotations generated by H0 leave both Tr[rho H0] and the spectrum unchanged
    rho = gibbs_matrix(REFERENCE, 293.0)
    u = np.diag(np.exp(1j * np.array([0.3, 1.1, -0.7, 2.0])))
    assert_allclose(ergotropy_general(u @ rho @ u.conj().T, H0), ergotropy_general(rho, H0), rtol=1e-12)


def test_susceptibility_regime():
    p = REFERENCE
    r = ergotropy_susceptibility_regime(p, 293.0)
    assert r.in_regime
    w = math.exp(-p.J / (oracles.KB * 293.0))
    assert_allclose(r.per_molecule, p.E0 * (1 - w) / (1 + 3 * w), rtol=1e-14)
    # the weak-field form drops corrections of order beta E0 ~ 5e-7
    assert_allclose(r.per_molecule, ergotropy_closed_form(p, 293.0).per_molecule, rtol=1e-6)
    hot = ergotropy_susceptibility_regime(p.with_field(100.0), 10.0)
    assert not hot.in_regime
    above = ergotropy_susceptibility_regime(p.with_field(crossing_field(p) + 1), 293.0)
    assert above.per_molecule == 0.0 and not above.in_regime
    assert in_susceptibility_regime(p, 2.0)


def test_from_susceptibility_roundtrip_units():
    p = REFERENCE
    for T in (5.0, 150.0, 293.0, 700.0):
        ref = ergotropy_susceptibility_regime(p, T).per_molecule
        for unit in ("J/T2/mol", "si", "cgs"):
            chi = bleaney_bowers(p, T, unit)
            assert_allclose(ergotropy_from_susceptibility(p, T, chi, unit).per_molecule, ref, rtol=1e-12)


def test_from_susceptibility_out_of_range():
    p = REFERENCE
    chi = 100 * bleaney_bowers(p, 293.0)
    with pytest.raises(DataInconsistencyError):
        ergotropy_from_susceptibility(p, 293.0, chi)
    with pytest.warns(ErgotropyRangeWarning):
        r = ergotropy_from_susceptibility(p, 293.0, chi, strict=False)
    assert r.per_molecule == 2 * p.E0
    assert r.warnings
    with pytest.raises(InvalidArgumentError):
        ergotropy_from_susceptibility(p, 293.0, -1.0)
    with pytest.raises(InvalidArgumentError):
        ergotropy_from_susceptibility(p, 293.0, 1.0, unit="emu")


def test_random_state_haar_sanity():
    # an arbitrary unitary image of a state can never beat the ergotropy
    rng = np.random.default_rng(8)
    rho = gibbs_matrix(REFERENCE, 293.0)
    base = np.real(np.trace(rho @ H0))
    cap = ergotropy_general(rho, H0)
    for u in haar_random_unitary(4, seed=rng, size=500):
        assert base - np.real(np.trace(u @ rho @ u.conj().T @ H0)) <= cap + 1e-12 * REFERENCE.E0
