"""Extractable work (ergotropy) of dimer states with respect to ``H0``.

Two independent routes are provided and cross-checked in the tests:

* the spectral route, valid for any state and reference Hamiltonian
  (:func:`passive_energy`, :func:`ergotropy_general`, plus a Haar-sampling
  lower bound), and
* closed forms for the thermal dimer, exact and in the weak-field
  (susceptibility) regime, including the readout from measured ``chi``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DataInconsistencyError, InvalidArgumentError
from .linalg import eig_hermitian, haar_random_unitary, unitary_from_hermitian
from .model import crossing_field
from .thermal import beta, validate_density_matrix
from .units import CHI_UNITS, K_B, MU_B, N_A, chi_to_molar_moment

REGIME_MAX_E0_OVER_KT = 1e-3


class ErgotropyRangeWarning(UserWarning):
    """An ergotropy estimate fell outside ``[0, 2 E0]`` and was clamped."""


@dataclass(frozen=True)
class ErgotropyResult:
    """Ergotropy per dimer with its per-mole and normalised views.

    ``normalized_to_thermal_max`` divides by ``E0`` (the zero-temperature
    thermal value); ``normalized_to_2E0`` divides by the full width ``2 E0``
    of the ``H0`` spectrum. Both are 0 when ``E0 = 0``.
    """

    per_molecule: float
    E0: float
    in_regime: bool = True
    warnings: tuple = field(default=())

    @property
    def per_mole(self):
        return self.per_molecule * N_A

    @property
    def normalized_to_thermal_max(self):
        return self.per_molecule / self.E0 if self.E0 > 0 else 0.0

    @property
    def normalized_to_2E0(self):
        return self.per_molecule / (2.0 * self.E0) if self.E0 > 0 else 0.0


def _report(value, E0, in_regime=True, notes=(), tol=1e-12):
    """Clamp to ``[0, 2 E0]``; rounding-level excursions are silent."""
    notes = list(notes)
    hi = 2.0 * E0
    slack = tol * max(E0, abs(value))
    if value < 0.0 or value > hi:
        if value < -slack or value > hi + slack:
            msg = f"ergotropy {value:.6e} J outside [0, {hi:.6e}] J; clamped"
            notes.append(msg)
            warnings.warn(msg, ErgotropyRangeWarning, stacklevel=3)
        value = min(max(value, 0.0), hi)
    return ErgotropyResult(float(value), float(E0), bool(in_regime), tuple(notes))


def _state_and_h0(rho, h0):
    rho = validate_density_matrix(rho)
    h0 = np.asarray(h0, dtype=complex)
    if h0.shape != (4, 4):
        raise InvalidArgumentError(f"H0 must be 4x4, got {h0.shape}")
    return rho, h0


def _sorted_spectra(rho, h0):
    sr = eig_hermitian(rho)
    sh = eig_hermitian(h0)
    # rho descending: reverse of eigh's ascending order
    return sr.eigenvalues[::-1], sr.eigenvectors[:, ::-1], sh.eigenvalues, sh.eigenvectors


def passive_energy(rho, h0):
    """``H0``-energy of the passive state of ``rho``.

    Pairs the populations of ``rho`` in decreasing order with the
    eigenvalues of ``h0`` in increasing order; this is the minimum of
    ``Tr[V rho V^dag H0]`` over all unitaries ``V``.
    """
    rho, h0 = _state_and_h0(rho, h0)
    lam, _, eps, _ = _sorted_spectra(rho, h0)
    return float(np.dot(lam, eps))


def ergotropy_general(rho, h0):
    """Ergotropy of an arbitrary two-qubit state with respect to ``h0``.

    Evaluated as ``sum_{n,i} r_n e_i (|<r_n|e_i>|^2 - delta_ni)`` with the
    state eigenvalues ``r_n`` descending and the ``h0`` eigenvalues ``e_i``
    ascending, i.e. ``Tr[rho H0]`` minus the passive energy. The raw value
    is returned and may be negative at the round-off level.
    """
    rho, h0 = _state_and_h0(rho, h0)
    lam, vr, eps, vh = _sorted_spectra(rho, h0)
    overlap = np.abs(vr.conj().T @ vh) ** 2
    return float(np.einsum("n,i,ni->", lam, eps, overlap - np.eye(4)))


def _h0_energy_stack(rho, h0, v):
    m = v @ rho @ np.swapaxes(v.conj(), -1, -2)
    return np.real(np.einsum("nij,ji->n", m, h0))


def ergotropy_random_unitary_bound(rho, h0, n_samples, seed, polish=False, chunk=20000):
    """Lower bound on the ergotropy from Haar-sampled unitaries.

    Returns ``max_V Tr[rho H0] - Tr[V rho V^dag H0]`` over ``n_samples``
    Haar unitaries drawn from ``numpy.random.default_rng(seed)``. Pure
    sampling closes the gap to the true ergotropy only slowly (roughly as
    ``n**(-1/3)`` for a pure state), so ``polish=True`` additionally runs a
    local optimisation over ``V = exp(iK) V_best``. Every candidate is
    unitary, so the result never exceeds :func:`ergotropy_general`.
    """
    if int(n_samples) < 1:
        raise InvalidArgumentError("n_samples must be >= 1")
    rho, h0 = _state_and_h0(rho, h0)
    rng = np.random.default_rng(seed)
    u0 = float(np.real(np.trace(rho @ h0)))
    best_val, best_v = math.inf, None
    remaining = int(n_samples)
    while remaining > 0:
        k = min(chunk, remaining)
        v = haar_random_unitary(4, seed=rng, size=k)
        e = _h0_energy_stack(rho, h0, v)
        i = int(np.argmin(e))
        if e[i] < best_val:
            best_val, best_v = float(e[i]), v[i]
        remaining -= k
    if polish:
        best_val = min(best_val, _polish(rho, h0, best_v))
    return u0 - best_val


def _hermitian_from_params(x):
    k = np.zeros((4, 4), dtype=complex)
    iu = np.triu_indices(4, 1)
    k[np.diag_indices(4)] = x[:4]
    k[iu] = x[4:10] + 1j * x[10:16]
    k = k + np.triu(k, 1).conj().T
    return k


def _polish(rho, h0, v, rounds=6):
    scale = float(np.max(np.abs(h0))) or 1.0
    hs = h0 / scale

    def energy(x, anchor):
        u = unitary_from_hermitian(_hermitian_from_params(x)) @ anchor
        return float(np.real(np.trace(u @ rho @ u.conj().T @ hs)))

    best = energy(np.zeros(16), v)
    for _ in range(rounds):
        res = minimize(energy, np.zeros(16), args=(v,), method="BFGS", options={"gtol": 1e-12})
        if res.fun >= best - 1e-15:
            break
        v = unitary_from_hermitian(_hermitian_from_params(res.x)) @ v
        best = energy(np.zeros(16), v)
    return best * scale


def _level_weights(p, T):
    """``exp(-beta(J-E0)), exp(-beta J), exp(-beta(J+E0))`` and ``beta E0``."""
    b = beta(T)
    J, E0 = p.J, p.E0
    return math.exp(-b * (J - E0)), math.exp(-b * J), math.exp(-b * (J + E0)), b * E0


def ergotropy_closed_form(p, T):
    """Exact thermal-state ergotropy of the dimer, per molecule.

    With ``w = exp(-beta J)`` and ``x = beta E0``::

        E0 < J :  E0 [1 - w (cosh x - 3 sinh x)] / [w (2 cosh x + 1) + 1]
        E0 >= J:  4 E0 w sinh x / [w (2 cosh x + 1) + 1]

    The branches differ by which state (singlet or ``|uu>``) is most
    populated. Both are evaluated after dividing through by the largest
    Boltzmann weight so that no exponential overflows.
    """
    E0 = p.E0
    if E0 == 0.0:
        beta(T)
        return _report(0.0, 0.0)
    if E0 < p.J:
        a, w, c, _ = _level_weights(p, T)
        value = E0 * (1.0 + a - 2.0 * c) / (1.0 + a + w + c)
    else:
        b = beta(T)
        x = b * E0
        inv_a = math.exp(b * (p.J - E0))
        value = 2.0 * E0 * (-math.expm1(-2.0 * x)) / (inv_a + 1.0 + math.exp(-x) + math.exp(-2.0 * x))
    return _report(value, E0)


def in_susceptibility_regime(p, T):
    return p.E0 * beta(T) <= REGIME_MAX_E0_OVER_KT and p.B_z < crossing_field(p)


def ergotropy_susceptibility_regime(p, T):
    """Weak-field limit ``E0 (e^{beta J} - 1)/(e^{beta J} + 3)``.

    Zero at or above the crossing field. ``in_regime`` is False when
    ``E0/k_B T`` exceeds 1e-3 or ``B_z >= B_c``.
    """
    b = beta(T)
    ok = in_susceptibility_regime(p, T)
    if p.B_z >= crossing_field(p):
        return ErgotropyResult(0.0, p.E0, False, ("B_z >= B_c: no ergotropy in the susceptibility limit",))
    w = math.exp(-b * p.J)
    value = p.E0 * (1.0 - w) / (1.0 + 3.0 * w)
    notes = () if ok else (f"E0/kT = {p.E0 * b:.3e} exceeds {REGIME_MAX_E0_OVER_KT}",)
    return _report(value, p.E0, ok, notes)


def reduced_susceptibility(T, chi, g):
    """``k_B T chi / (2 N_A g^2 mu_B^2)`` for ``chi`` in J T^-2 mol^-1."""
    return chi * (K_B * T / (2.0 * N_A * g * g * MU_B * MU_B))


def ergotropy_from_susceptibility(p, T, chi, unit="J/T2/mol", strict=True):
    """Ergotropy read out from a measured molar susceptibility.

    ``E0 * k_B T chi / (2 N_A g^2 mu_B^2) * (e^{beta J} - 1)``, with ``chi``
    per mole of dimers. For the model's own Bleaney-Bowers ``chi`` this is
    identical to :func:`ergotropy_susceptibility_regime`.

    Raises:
        InvalidArgumentError: ``chi <= 0`` or unknown unit.
        DataInconsistencyError: the estimate lies outside ``[0, 2 E0]`` and
            ``strict`` is set. With ``strict=False`` it is clamped and the
            excursion recorded in ``warnings``.
    """
    if unit not in CHI_UNITS:
        raise InvalidArgumentError(f"unknown susceptibility unit {unit!r}")
    chi = float(chi)
    if not (chi > 0) or not math.isfinite(chi):
        raise InvalidArgumentError(f"susceptibility must be positive and finite, got {chi!r}")
    b = beta(T)
    chi_m = chi_to_molar_moment(chi, unit)
    r = reduced_susceptibility(T, chi_m, p.g)
    bj = b * p.J
    # r (e^{bJ} - 1) without overflowing e^{bJ}
    factor = math.exp(math.log(r) + bj) * (-math.expm1(-bj)) if bj > 0 else 0.0
    value = p.E0 * factor
    ok = in_susceptibility_regime(p, T)
    hi = 2.0 * p.E0
    if strict and (value < 0 or value > hi * (1 + 1e-12)):
        raise DataInconsistencyError(
            f"susceptibility {chi!r} ({unit}) at T = {T!r} K implies ergotropy {value:.6e} J "
            f"outside [0, {hi:.6e}] J"
        )
    return _report(value, p.E0, ok)
