"""Physical constants (CODATA 2018) and the small set of unit conversions used here.

Everything inside the package is SI. Per-mole values are derived views
(per-molecule value times ``N_A``); the exchange constant is read in kelvin
and converted once.

Susceptibility comes in three flavours:

* ``J/T2/mol`` -- molar moment response ``dM/dB`` (J T^-2 mol^-1). This is
  what the dimer formulas produce and consume.
* ``si`` -- SI molar volume susceptibility (m^3/mol) = ``mu_0 * dM/dB``.
* ``cgs`` -- emu/mol (cm^3/mol); ``si = 4*pi*1e-6 * cgs``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError, UnitMismatchError


@dataclass(frozen=True)
class PhysicalConstants:
    k_B: float = 1.380649e-23  # J/K, exact
    mu_B: float = 9.2740100783e-24  # J/T
    N_A: float = 6.02214076e23  # 1/mol, exact
    mu_0: float = 1.25663706212e-6  # N/A^2


CONSTANTS = PhysicalConstants()
K_B = CONSTANTS.k_B
MU_B = CONSTANTS.mu_B
N_A = CONSTANTS.N_A
MU_0 = CONSTANTS.mu_0

CGS_TO_SI_CHI = 4.0 * math.pi * 1e-6

UNITS = frozenset({
    "joule",
    "joule_per_mol",
    "kelvin",
    "tesla",
    "dimensionless",
    "si_volume_susceptibility_per_mol",
    "cgs_emu_per_mol",
})

CHI_UNITS = ("J/T2/mol", "si", "cgs")


def _finite(x, name="value"):
    x = float(x)
    if not math.isfinite(x):
        raise InvalidArgumentError(f"{name} must be finite, got {x!r}")
    return x


def energy_from_kelvin(x):
    """Energy in joules of a temperature-equivalent ``x`` (K)."""
    return _finite(x, "temperature-equivalent energy") * K_B


def kelvin_from_energy(e):
    return _finite(e, "energy") / K_B


def zeeman_energy(g, B_z):
    """Zeeman scale ``E0 = g mu_B B_z`` in joules.

    The field orientation is fixed by the model, so ``B_z`` must be >= 0.
    """
    g = _finite(g, "g")
    B_z = _finite(B_z, "B_z")
    if g <= 0:
        raise InvalidArgumentError(f"g must be positive, got {g}")
    if B_z < 0:
        raise InvalidArgumentError(f"B_z must be >= 0, got {B_z}")
    return g * MU_B * B_z


def per_mole(e):
    return e * N_A


def chi_cgs_to_si(chi):
    """emu/mol -> m^3/mol."""
    return chi * CGS_TO_SI_CHI


def chi_si_to_cgs(chi):
    """m^3/mol -> emu/mol."""
    return chi / CGS_TO_SI_CHI


def chi_to_molar_moment(chi, unit):
    """Convert a molar susceptibility to ``dM/dB`` in J T^-2 mol^-1."""
    if unit == "J/T2/mol":
        return chi
    if unit == "si":
        return chi / MU_0
    if unit == "cgs":
        return chi_cgs_to_si(chi) / MU_0
    raise InvalidArgumentError(f"unknown susceptibility unit {unit!r}; expected one of {CHI_UNITS}")


def chi_from_molar_moment(chi, unit):
    """Inverse of :func:`chi_to_molar_moment`."""
    if unit == "J/T2/mol":
        return chi
    if unit == "si":
        return chi * MU_0
    if unit == "cgs":
        return chi_si_to_cgs(chi * MU_0)
    raise InvalidArgumentError(f"unknown susceptibility unit {unit!r}; expected one of {CHI_UNITS}")


# factors to a canonical unit within each convertible family
_FAMILY = {
    "joule": ("energy", 1.0),
    "joule_per_mol": ("energy", 1.0 / N_A),
    "kelvin": ("energy", K_B),
    "si_volume_susceptibility_per_mol": ("chi", 1.0),
    "cgs_emu_per_mol": ("chi", CGS_TO_SI_CHI),
    "tesla": ("field", 1.0),
    "dimensionless": ("number", 1.0),
}


@dataclass(frozen=True)
class Quantity:
    """A float tagged with one of the seven supported units.

    Addition and subtraction require identical units; use :meth:`to` first.
    Scaling by a plain number keeps the unit.
    """

    value: float
    unit: str

    def __post_init__(self):
        if self.unit not in UNITS:
            raise InvalidArgumentError(f"unsupported unit {self.unit!r}")

    def _check(self, other):
        if not isinstance(other, Quantity):
            return NotImplemented
        if other.unit != self.unit:
            raise UnitMismatchError(f"cannot combine {self.unit} with {other.unit}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return Quantity(self.value + other.value, self.unit)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return Quantity(self.value - other.value, self.unit)

    def __neg__(self):
        return Quantity(-self.value, self.unit)

    def __mul__(self, k):
        if isinstance(k, Quantity):
            raise UnitMismatchError("products of quantities are outside the supported unit set")
        return Quantity(self.value * float(k), self.unit)

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, Quantity):
            if k.unit != self.unit:
                raise UnitMismatchError(f"cannot divide {self.unit} by {k.unit}")
            return Quantity(self.value / k.value, "dimensionless")
        return Quantity(self.value / float(k), self.unit)

    def __lt__(self, other):
        return self.value < self._check(other).value

    def __le__(self, other):
        return self.value <= self._check(other).value

    def to(self, unit):
        """Convert within a family (energy: J, J/mol, K; susceptibility: SI, cgs)."""
        if unit == self.unit:
            return self
        if unit not in UNITS:
            raise InvalidArgumentError(f"unsupported unit {unit!r}")
        fam_a, fa = _FAMILY[self.unit]
        fam_b, fb = _FAMILY[unit]
        if fam_a != fam_b:
            raise UnitMismatchError(f"cannot convert {self.unit} to {unit}")
        return Quantity(self.value * fa / fb, unit)
