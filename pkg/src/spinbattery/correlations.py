"""Entanglement and discord of the dimer state.

Concurrence follows Wootters: eigenvalues of
``R = sqrt(sqrt(rho) rho_tilde sqrt(rho))`` with the spin flip
``rho_tilde = (sy x sy) rho* (sy x sy)``. Discord is the Schatten 1-norm
(trace distance) discord, normalised so that a Bell state has 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidArgumentError
from .linalg import SIGMA_X, SIGMA_Y, SIGMA_YY, SIGMA_Z, I2, matrix_sqrt_psd
from .thermal import XState, beta, gibbs_matrix, log_partition_function, validate_density_matrix
from .units import K_B

LN3 = math.log(3.0)


@dataclass(frozen=True)
class CorrelationSet:
    concurrence: float
    eof: float
    discord_1norm: float
    entanglement_temperature: float

    def __post_init__(self):
        for name in ("concurrence", "eof", "discord_1norm", "entanglement_temperature"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"{name} must be finite")
        if not 0.0 <= self.concurrence <= 1.0 or not 0.0 <= self.eof <= 1.0:
            raise InvalidArgumentError("concurrence and EoF must lie in [0, 1]")
        if not 0.0 <= self.discord_1norm <= 0.5:
            raise InvalidArgumentError("discord must lie in [0, 1/2]")
        if (self.concurrence == 0.0) != (self.eof == 0.0):
            raise InvalidArgumentError("EoF must vanish exactly when concurrence does")


def spin_flip(rho):
    return SIGMA_YY @ np.conj(rho) @ SIGMA_YY


def wootters_lambdas(rho):
    """Eigenvalues of Wootters' ``R`` matrix in decreasing order.

    ``R^2 = sqrt(rho) rho_tilde sqrt(rho) = A A^dag`` with
    ``A = sqrt(rho) sqrt(rho_tilde)`` and ``sqrt(rho_tilde)`` the spin flip of
    ``sqrt(rho)``, so the eigenvalues of ``R`` are the singular values of
    ``A``. Taking them from an SVD avoids the second matrix square root,
    which would cost ~sqrt(eps) accuracy for nearly pure states.
    """
    rho = validate_density_matrix(rho)
    sq = matrix_sqrt_psd(rho)
    return np.linalg.svd(sq @ spin_flip(sq), compute_uv=False)


def concurrence_wootters(rho):
    lam = wootters_lambdas(rho)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(max(c, 0.0), 1.0))


@dataclass(frozen=True)
class ConcurrenceComparison:
    """Wootters concurrence next to the literature closed form it is audited against.

    The closed form is ``e^x (1 - 3w) / (4 (w + e^x + w e^x + w e^{2x}))``
    with ``w = e^{-beta J}`` and ``x = beta E0``, clamped at 0. It shares its
    zero with the Wootters value but is a factor 4 smaller below it.
    """

    wootters: float
    closed_form: float

    @property
    def ratio(self):
        return self.wootters / self.closed_form if self.closed_form > 0 else math.nan


def concurrence_literature_unclamped(p, T):
    b = beta(T)
    w = math.exp(-b * p.J)
    x = b * p.E0
    # e^x / (w + e^x + w e^x + w e^{2x}), divided through by e^x
    den = w * math.exp(-x) + 1.0 + w + w * math.exp(x) if x < 700 else math.inf
    return (1.0 - 3.0 * w) / (4.0 * den)


def concurrence_closed_form(p, T):
    lit = max(0.0, concurrence_literature_unclamped(p, T))
    return ConcurrenceComparison(concurrence_wootters(gibbs_matrix(p, T)), lit)


def entanglement_of_formation(concurrence):
    """EoF of a two-qubit state from its concurrence (binary entropy form)."""
    c = float(concurrence)
    if not (-1e-12 <= c <= 1.0 + 1e-12):
        raise InvalidArgumentError(f"concurrence must lie in [0, 1], got {c!r}")
    c = min(max(c, 0.0), 1.0)
    if c == 0.0:
        return 0.0
    s = math.sqrt(max(1.0 - c * c, 0.0))
    # (1 - s)/2 written without cancellation for small c
    q = c * c / (2.0 * (1.0 + s))
    if q == 0.0:
        return 0.0
    out = -q * math.log2(q) - (1.0 - q) * math.log1p(-q) / math.log(2.0)
    return min(out, 1.0)


def entanglement_temperature(p):
    """``T_e = J / (k_B ln 3)``, above which the thermal dimer is separable."""
    if not p.J > 0:
        raise InvalidArgumentError("entanglement temperature needs J > 0")
    return p.J / (K_B * LN3)


def discord_1norm_closed(p, T):
    """Trace-distance discord of the thermal state.

    In the form ``(1/2) |coth(z/2) + cosh(x) (1 + coth(z/2))|^-1`` with
    ``z = -beta J``, ``x = beta E0``. Multiplying out the hyperbolic
    functions gives ``(1 - e^{-beta J}) / (2 Z)``, which is what is
    evaluated (no overflow at large ``x`` or ``beta J``).
    """
    b = beta(T)
    one_minus_w = -math.expm1(-b * p.J)
    return 0.5 * one_minus_w * math.exp(-log_partition_function(p, T))


def discord_limit(p, T):
    """Weak-field discord ``(1/2)(e^{beta J} - 1)/(e^{beta J} + 3)``."""
    w = math.exp(-beta(T) * p.J)
    return 0.5 * (1.0 - w) / (1.0 + 3.0 * w)


def _fibonacci_hemisphere(n):
    i = np.arange(n) + 0.5
    z = i / n  # uniform in (0, 1): upper hemisphere, n and -n are equivalent
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    r = np.sqrt(1.0 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


_PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


def _induced_distance(rho, dirs):
    """Half trace norm of ``rho - Pi_n(rho)`` for each unit vector in ``dirs``.

    With ``N = n.sigma`` on qubit A the measured state is
    ``(rho + N rho N)/2``, so the difference is ``(rho - N rho N)/2``.
    """
    dirs = np.atleast_2d(dirs)
    n_op = np.einsum("ka,aij->kij", dirs, _PAULI)
    big = np.einsum("kij,lm->kiljm", n_op, I2).reshape(-1, 4, 4)
    diff = 0.5 * (rho - big @ rho @ big)
    return 0.5 * np.abs(np.linalg.eigvalsh(diff)).sum(axis=-1)


def _angles_to_dir(t):
    th, ph = t
    return np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])


def discord_1norm_xstate_oracle(rho, n_grid=10000, n_refine=3):
    """Brute-force trace-distance discord of an X state.

    Minimises, over measurement directions on the first qubit, half the
    trace norm between ``rho`` and its post-measurement classical-quantum
    state. A Fibonacci grid of ``n_grid`` directions is followed by a
    Nelder-Mead polish of the ``n_refine`` best grid points, so the result
    is deterministic.
    """
    if not isinstance(rho, XState):
        rho = XState.from_matrix(validate_density_matrix(rho))
    m = rho.to_matrix()
    dirs = _fibonacci_hemisphere(int(n_grid))
    vals = _induced_distance(m, dirs)
    best = float(vals.min())
    for k in np.argsort(vals)[:n_refine]:
        d = dirs[k]
        t0 = np.array([math.acos(min(1.0, d[2])), math.atan2(d[1], d[0])])
        res = minimize(
            lambda t: float(_induced_distance(m, _angles_to_dir(t))[0]),
            t0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000},
        )
        best = min(best, float(res.fun))
    return best


def thermal_correlations(p, T):
    c = concurrence_wootters(gibbs_matrix(p, T))
    return CorrelationSet(
        concurrence=c,
        eof=entanglement_of_formation(c),
        discord_1norm=discord_1norm_closed(p, T),
        entanglement_temperature=entanglement_temperature(p),
    )
