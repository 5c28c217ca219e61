"""Idealised two-stroke discharge/recharge cycle of the dimer battery.

Discharge is a reset channel to ``|dd>`` (the ``H0`` ground state) that
credits the battery with the ergotropy of the state it replaces; recharge
is complete, instantaneous thermalisation with a bath. Work is measured
against ``H0``, heat against the full system Hamiltonian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ergotropy import ergotropy_general
from .errors import InvalidArgumentError
from .model import build_hamiltonian, self_hamiltonian
from .thermal import beta, gibbs_matrix, validate_density_matrix

MODEL_NOTE = (
    "discharge modelled as an ideal reset channel to |dd> crediting the prior ergotropy; "
    "recharge is instantaneous full thermalisation"
)

DOWN_DOWN = np.zeros((4, 4), dtype=complex)
DOWN_DOWN[3, 3] = 1.0


def _energy(rho, h):
    return float(np.real(np.trace(rho @ h)))


@dataclass(frozen=True)
class CycleStep:
    label: str
    state: np.ndarray = field(repr=False)
    internal_energy_H0: float
    energy_H: float
    ergotropy: float
    heat_absorbed: float | None = None
    work_extracted: float | None = None

    def as_dict(self, per_mole=1.0):
        d = {
            "label": self.label,
            "internal_energy_H0": self.internal_energy_H0 * per_mole,
            "energy_H": self.energy_H * per_mole,
            "ergotropy": self.ergotropy * per_mole,
            "heat_absorbed": None if self.heat_absorbed is None else self.heat_absorbed * per_mole,
            "work_extracted": None if self.work_extracted is None else self.work_extracted * per_mole,
            "populations_product_basis": np.real(np.diag(self.state)).tolist(),
        }
        return d


@dataclass(frozen=True)
class CycleTrace:
    steps: tuple
    T_bath: float

    def __len__(self):
        return len(self.steps)

    @property
    def work_per_cycle(self):
        return [s.work_extracted for s in self.steps if s.label == "discharge"]

    @property
    def heat_per_cycle(self):
        return [s.heat_absorbed for s in self.steps if s.label == "recharge"]

    def audit_residuals(self):
        """Change of ``Tr[H rho]`` over each cycle, from the strokes.

        The discharge stroke moves ``Tr[H rho]`` from the thermal value to
        ``J + E0``; recharge absorbs heat ``Q``. The state returns to the
        Gibbs state, so ``(E_dd - E_th) + Q`` must vanish.
        """
        out = []
        for i in range(1, len(self.steps) - 1, 2):
            before, dis, rec = self.steps[i - 1], self.steps[i], self.steps[i + 1]
            out.append((dis.energy_H - before.energy_H) + rec.heat_absorbed)
        return out


def discharge(state, p):
    """Reset to ``|dd><dd|``; returns ``(new_state, work_extracted)``."""
    rho = validate_density_matrix(state)
    work = max(ergotropy_general(rho, self_hamiltonian(p)), 0.0)
    return DOWN_DOWN.copy(), work


def recharge(p, T_bath, state=None):
    """Thermalise with the bath; returns ``(gibbs_state, heat_absorbed)``.

    Heat is ``Tr[H (rho_gibbs - rho_prev)]``; ``state`` defaults to
    ``|dd><dd|``, the post-discharge state.
    """
    beta(T_bath)
    prev = DOWN_DOWN if state is None else validate_density_matrix(state)
    new = gibbs_matrix(p, T_bath)
    h = build_hamiltonian(p, shift_to_singlet=True)
    return new, _energy(new, h) - _energy(prev, h)


def _step(label, rho, p, h, h0, heat=None, work=None):
    e = ergotropy_general(rho, h0)
    return CycleStep(label, rho, _energy(rho, h0), _energy(rho, h), max(e, 0.0), heat, work)


def run_cycle(p, T_bath, n_cycles):
    """Alternate discharge and recharge ``n_cycles`` times from the Gibbs state."""
    n_cycles = int(n_cycles)
    if n_cycles < 1:
        raise InvalidArgumentError("n_cycles must be >= 1")
    h = build_hamiltonian(p, shift_to_singlet=True)
    h0 = self_hamiltonian(p)
    rho = gibbs_matrix(p, T_bath)
    steps = [_step("initial", rho, p, h, h0)]
    for _ in range(n_cycles):
        rho, work = discharge(rho, p)
        steps.append(_step("discharge", rho, p, h, h0, work=work))
        rho, heat = recharge(p, T_bath, rho)
        steps.append(_step("recharge", rho, p, h, h0, heat=heat))
    return CycleTrace(tuple(steps), float(T_bath))


def cycle_to_dict(trace, per_mole=1.0, energy_unit="J"):
    cycles = []
    residuals = trace.audit_residuals()
    for k, (w, q, r) in enumerate(zip(trace.work_per_cycle, trace.heat_per_cycle, residuals)):
        cycles.append({"cycle": k + 1, "work_extracted": w * per_mole, "heat_absorbed": q * per_mole,
                       "audit_residual": r * per_mole})
    return {
        "T_bath_K": trace.T_bath,
        "energy_unit": energy_unit,
        "steps": [s.as_dict(per_mole) for s in trace.steps],
        "cycles": cycles,
        "metadata": {"model": MODEL_NOTE},
    }


def audit_ok(trace, J, tol=1e-12):
    return all(math.isfinite(r) and abs(r) <= tol * J for r in trace.audit_residuals())
