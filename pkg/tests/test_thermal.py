import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import oracles
from spinbattery.errors import InvalidArgumentError
from spinbattery.model import REFERENCE, DimerParams
from spinbattery.thermal import (
    XState,
    beta,
    gibbs_matrix,
    gibbs_state,
    log_partition_function,
    partition_function,
    populations,
    purity,
    validate_density_matrix,
)


def test_reference_populations_at_room_temperature():
    pop = populations(REFERENCE, 293.0)
    assert_allclose(partition_function(REFERENCE, 293.0), 1.2335664, rtol=1e-7)
    assert_allclose(pop.beta_minus, 0.8106576, rtol=1e-6)
    for x in (pop.up_up, pop.beta_plus, pop.down_down):
        assert_allclose(x, 0.0631141, rtol=1e-5)
    assert_allclose(pop.as_array().sum(), 1.0, rtol=1e-15)


def test_partition_function_closed_form():
    for T in (5.0, 77.0, 293.0, 900.0):
        b = 1 / (oracles.KB * T)
        p = REFERENCE.with_field(40.0)
        z = 1 + math.exp(-b * p.J) * (1 + 2 * math.cosh(b * p.E0))
        assert_allclose(partition_function(p, T), z, rtol=1e-14)


@pytest.mark.parametrize("T", [0.0, -1.0, math.inf, math.nan])
def test_beta_rejects(T):
    with pytest.raises(InvalidArgumentError):
        beta(T)


def test_gibbs_matches_matrix_exponential():
    for B in (1e-4, 10.0, 600.0):
        p = REFERENCE.with_field(B)
        for T in (20.0, 293.0, 800.0):
            assert_allclose(gibbs_matrix(p, T), oracles.gibbs_expm(p.J, p.E0, T), atol=1e-14)


def test_gibbs_is_x_state_with_real_coherence():
    s = gibbs_state(REFERENCE, 293.0)
    m = s.to_matrix()
    assert m[0, 3] == 0 and m[3, 0] == 0
    assert s.inner_offdiag < 0
    assert XState.from_matrix(m) == s
    validate_density_matrix(s)


def test_low_temperature_degrades_to_singlet():
    rho = gibbs_matrix(REFERENCE, 0.5)
    singlet = np.array([0, -1, 1, 0]) / math.sqrt(2)
    assert_allclose(rho, np.outer(singlet, singlet), atol=1e-15)
    assert_allclose(purity(rho), 1.0, atol=1e-14)
    assert math.isfinite(log_partition_function(REFERENCE, 1e-3))


def test_far_above_crossing_ground_state_is_up_up():
    p = REFERENCE.with_field(3000.0)
    pop = populations(p, 0.1)
    assert pop.up_up == 1.0
    assert partition_function(p, 0.1) == math.inf
    assert math.isfinite(log_partition_function(p, 0.1))


def test_xstate_validation():
    with pytest.raises(InvalidArgumentError):
        XState((0.5, 0.5, 0.5, 0.0), 0.0)
    with pytest.raises(InvalidArgumentError):
        XState((0.0, 0.5, 0.5, 0.0), 0.6)
    m = np.eye(4) / 4
    m[0, 3] = m[3, 0] = 0.1
    with pytest.raises(InvalidArgumentError):
        XState.from_matrix(m)


def test_validate_density_matrix_rejects():
    with pytest.raises(InvalidArgumentError):
        validate_density_matrix(np.eye(4))
    with pytest.raises(InvalidArgumentError):
        validate_density_matrix(np.diag([1.5, -0.5, 0, 0]))
    with pytest.raises(InvalidArgumentError):
        validate_density_matrix(np.eye(3) / 3)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 3000.0), st.floats(1.0, 2000.0), st.floats(1.0, 1500.0))
def test_populations_normalized_and_boltzmann_ordered(jk, b, T):
    p = DimerParams.from_kelvin(jk, 2.0, b)
    pop = populations(p, T)
    assert_allclose(pop.as_array().sum(), 1.0, rtol=1e-14)
    # levels uu <= b+ <= dd, so populations are ordered the other way
    assert pop.down_down <= pop.beta_plus <= pop.up_up
    assert np.all(pop.as_array() >= 0)
