"""Gibbs state of the dimer, its populations and partition function.

Populations are computed from the singlet-referenced levels in log space,
so ``T -> 0`` degrades to the pure ground state instead of overflowing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidArgumentError
from .model import LEVEL_LABELS, energy_levels
from .units import K_B


def beta(T):
    T = float(T)
    if not (T > 0) or not math.isfinite(T):
        raise InvalidArgumentError(f"temperature must be positive and finite, got {T!r}")
    return 1.0 / (K_B * T)


@dataclass(frozen=True)
class Populations:
    """Occupation probabilities of the four coupled states."""

    beta_minus: float
    up_up: float
    beta_plus: float
    down_down: float

    def as_array(self):
        return np.array([self.beta_minus, self.up_up, self.beta_plus, self.down_down])

    def as_dict(self):
        return dict(zip(LEVEL_LABELS, self.as_array().tolist()))


@dataclass(frozen=True)
class XState:
    """Two-qubit X state with real entries, as produced by the thermal dimer.

    ``diag`` holds ``rho_uu, rho_ud, rho_du, rho_dd`` and
    ``inner_offdiag`` the ``<ud|rho|du>`` coherence. The outer
    ``<uu|rho|dd>`` coherence is always zero for this model.
    """

    diag: tuple
    inner_offdiag: float

    def __post_init__(self):
        d = tuple(float(x) for x in self.diag)
        if len(d) != 4:
            raise InvalidArgumentError("XState needs four diagonal entries")
        object.__setattr__(self, "diag", d)
        if min(d) < -1e-12:
            raise InvalidArgumentError("negative population on the diagonal")
        if abs(sum(d) - 1.0) > 1e-12:
            raise InvalidArgumentError(f"trace is {sum(d)!r}, expected 1")
        if abs(self.inner_offdiag) > math.sqrt(max(d[1] * d[2], 0.0)) * (1 + 1e-12) + 1e-15:
            raise InvalidArgumentError("coherence exceeds positivity bound")

    def to_matrix(self):
        rho = np.diag(np.asarray(self.diag, dtype=complex))
        rho[1, 2] = rho[2, 1] = self.inner_offdiag
        return rho

    @classmethod
    def from_matrix(cls, rho, tol=1e-12):
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (4, 4):
            raise InvalidArgumentError(f"expected 4x4, got {rho.shape}")
        mask = np.ones((4, 4), bool)
        mask[np.diag_indices(4)] = False
        mask[1, 2] = mask[2, 1] = False
        if np.max(np.abs(rho[mask])) > tol:
            raise InvalidArgumentError("state is not of the real X form handled here")
        z = rho[1, 2]
        if abs(z.imag) > tol or abs(rho[2, 1] - z.conjugate()) > tol:
            raise InvalidArgumentError("inner coherence must be real")
        return cls(tuple(np.real(np.diag(rho))), float(z.real))


def _log_weights(p, T):
    b = beta(T)
    lv = energy_levels(p)
    return np.array([-b * lv[k] for k in LEVEL_LABELS])


def log_partition_function(p, T):
    """``ln Z`` with the singlet at zero energy."""
    return float(logsumexp(_log_weights(p, T)))


def partition_function(p, T):
    """``Z = 1 + exp(-beta J) (1 + 2 cosh(beta E0))`` (singlet-referenced).

    Returns ``inf`` when ``Z`` exceeds the float range (far above the level
    crossing at very low temperature); use :func:`log_partition_function`
    there.
    """
    lz = log_partition_function(p, T)
    return math.exp(lz) if lz < 709.0 else math.inf


def populations(p, T):
    lw = _log_weights(p, T)
    pr = np.exp(lw - logsumexp(lw))
    return Populations(*(float(x) for x in pr))


def gibbs_state(p, T):
    """Thermal state ``exp(-beta H)/Z`` in X form.

    Assembled from the populations: the singlet/``b+`` pair fills the
    central block as ``(p_b+ + p_b-)/2`` on the diagonal and
    ``(p_b+ - p_b-)/2`` off it.
    """
    pop = populations(p, T)
    mid = 0.5 * (pop.beta_plus + pop.beta_minus)
    z = 0.5 * (pop.beta_plus - pop.beta_minus)
    # renormalise so the diagonal sums to 1 to the last ulp
    d = np.array([pop.up_up, mid, mid, pop.down_down])
    s = d.sum()
    return XState(tuple(d / s), z / s)


def gibbs_matrix(p, T):
    return gibbs_state(p, T).to_matrix()


def purity(rho):
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def validate_density_matrix(rho, tol=1e-12):
    """Check Hermiticity, unit trace and positivity; return ``rho`` as complex array."""
    if isinstance(rho, XState):
        return rho.to_matrix()
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidArgumentError(f"density matrix must be 4x4, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidArgumentError("density matrix has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > max(tol, 1e-14):
        raise InvalidArgumentError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise InvalidArgumentError(f"density matrix trace is {tr!r}")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -tol:
        raise InvalidArgumentError("density matrix has a negative eigenvalue")
    return rho
