"""Spin-1/2 dimer quantum battery: ergotropy, correlations and magnetic readout."""

from .correlations import (
    CorrelationSet,
    concurrence_closed_form,
    concurrence_wootters,
    discord_1norm_closed,
    discord_1norm_xstate_oracle,
    discord_limit,
    entanglement_of_formation,
    entanglement_temperature,
    thermal_correlations,
)
from .cycle import CycleTrace, discharge, recharge, run_cycle
from .ergotropy import (
    ErgotropyResult,
    ergotropy_closed_form,
    ergotropy_from_susceptibility,
    ergotropy_general,
    ergotropy_random_unitary_bound,
    ergotropy_susceptibility_regime,
    passive_energy,
)
from .errors import ChiParseError, DataInconsistencyError, InvalidArgumentError, UnitMismatchError
from .magnetometry import (
    SusceptibilityCurve,
    bleaney_bowers,
    correlations_from_chi,
    ingest_chi_csv,
    invert_chi,
    magnetization,
    susceptibility_numeric,
)
from .model import (
    REFERENCE,
    DimerParams,
    build_hamiltonian,
    crossing_field,
    dimer_spectrum,
    energy_levels,
    self_hamiltonian,
)
from .thermal import XState, gibbs_state, partition_function, populations
from .units import CONSTANTS, Quantity, energy_from_kelvin, zeeman_energy

__version__ = "0.1.0"

__all__ = [
    "bleaney_bowers",
    "build_hamiltonian",
    "ChiParseError",
    "concurrence_closed_form",
    "concurrence_wootters",
    "CONSTANTS",
    "correlations_from_chi",
    "CorrelationSet",
    "crossing_field",
    "CycleTrace",
    "DataInconsistencyError",
    "dimer_spectrum",
    "DimerParams",
    "discharge",
    "discord_1norm_closed",
    "discord_1norm_xstate_oracle",
    "discord_limit",
    "energy_from_kelvin",
    "energy_levels",
    "entanglement_of_formation",
    "entanglement_temperature",
    "ergotropy_closed_form",
    "ergotropy_from_susceptibility",
    "ergotropy_general",
    "ergotropy_random_unitary_bound",
    "ergotropy_susceptibility_regime",
    "ErgotropyResult",
    "gibbs_state",
    "ingest_chi_csv",
    "InvalidArgumentError",
    "invert_chi",
    "magnetization",
    "partition_function",
    "passive_energy",
    "populations",
    "Quantity",
    "recharge",
    "REFERENCE",
    "run_cycle",
    "self_hamiltonian",
    "susceptibility_numeric",
    "SusceptibilityCurve",
    "thermal_correlations",
    "UnitMismatchError",
    "XState",
    "zeeman_energy",
    "__version__",
]
