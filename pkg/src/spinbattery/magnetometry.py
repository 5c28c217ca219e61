"""Magnetic observables of the dimer and the susceptibility readout chain.

Susceptibilities inside the formulas are molar moment responses
``dM/dB`` in J T^-2 mol^-1, per mole of dimers; see :mod:`spinbattery.units`
for the SI (m^3/mol) and cgs (emu/mol) views.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .correlations import entanglement_of_formation, entanglement_temperature
from .ergotropy import ErgotropyResult, ergotropy_from_susceptibility
from .errors import ChiParseError, DataInconsistencyError, InvalidArgumentError
from .model import crossing_field
from .thermal import beta
from .units import K_B, MU_B, N_A, chi_from_molar_moment, chi_to_molar_moment

PER_MOLE_OF = ("dimer", "cu_ion")


def _magnetization(J, g, B, T):
    """Moment per dimer (J/T) for a signed field ``B``; odd in ``B``."""
    b = beta(T)
    bj = b * J
    x = b * g * MU_B * B
    ax = abs(x)
    sign = math.copysign(1.0, x) if x != 0 else 0.0
    tail = -math.expm1(-2.0 * ax)  # 1 - e^{-2|x|}
    if ax <= bj:
        # everything scaled to the singlet weight 1
        num = math.exp(ax - bj) * tail
        den = 1.0 + math.exp(-bj) + math.exp(x - bj) + math.exp(-x - bj)
    else:
        # scaled to the dominant field-aligned triplet weight
        num = tail
        den = math.exp(bj - ax) + math.exp(-ax) + 1.0 + math.exp(-2.0 * ax)
    return g * MU_B * sign * num / den


def magnetization(p, T, per_mole=False):
    """Equilibrium moment ``k_B T d(ln Z)/dB`` of one dimer (J/T).

    Closed form ``g mu_B (e^{2x} - 1) / (1 + e^x (1 + e^{beta J} + e^x))``
    with ``x = beta E0``; it saturates at ``g mu_B``.
    """
    m = _magnetization(p.J, p.g, p.B_z, T)
    return m * N_A if per_mole else m


def bleaney_bowers_from_weight(T, w, g, unit="J/T2/mol"):
    """``2 N_A g^2 mu_B^2 / (k_B T (3 + w))`` for a given ``w = e^{beta J}``."""
    chi = 2.0 * N_A * (g * MU_B) ** 2 / (K_B * T * (3.0 + w))
    return chi_from_molar_moment(chi, unit)


def bleaney_bowers(p, T, unit="J/T2/mol"):
    """Zero-field molar susceptibility of the dimer, per mole of dimers."""
    b = beta(T)
    q = math.exp(-b * p.J)  # 1/(3 + e^{bJ}) = q/(1 + 3q)
    chi = 2.0 * N_A * (p.g * MU_B) ** 2 * b * q / (1.0 + 3.0 * q)
    return chi_from_molar_moment(chi, unit)


def susceptibility_numeric(p, T, dB, unit="J/T2/mol"):
    """Zero-field ``dM/dB`` by central difference with step ``dB``.

    Only ``J`` and ``g`` of ``p`` matter; the result converges to
    :func:`bleaney_bowers` with an ``O(dB^2)`` error.
    """
    dB = float(dB)
    bc = crossing_field(p)
    if not (0 < dB < bc / 1e3):
        raise InvalidArgumentError(f"step dB must lie in (0, B_c/1000) = (0, {bc / 1e3:.4g}) T, got {dB!r}")
    d = (_magnetization(p.J, p.g, dB, T) - _magnetization(p.J, p.g, -dB, T)) / (2.0 * dB)
    return chi_from_molar_moment(d * N_A, unit)


@dataclass(frozen=True)
class EffectiveBoltzmann:
    """``w`` estimates ``e^{beta J}`` from one susceptibility sample."""

    T: float
    w: float

    @property
    def in_model_range(self):
        # w < 1 would need J < 0; allow round-off at the w = 1 boundary
        return self.w >= 1.0 - 1e-12

    @property
    def at_boundary(self):
        return abs(self.w - 1.0) <= 1e-12


def invert_chi(T, chi, g, unit="J/T2/mol"):
    """Solve the Bleaney-Bowers relation for the singlet/triplet weight.

    ``w = 2 N_A g^2 mu_B^2 / (k_B T chi) - 3``.

    Raises:
        InvalidArgumentError: ``chi <= 0``.
        DataInconsistencyError: ``chi`` above the ``w = 0`` ceiling
            ``2 N_A g^2 mu_B^2 / (3 k_B T)``.
    """
    chi = float(chi)
    if not (chi > 0) or not math.isfinite(chi):
        raise InvalidArgumentError(f"susceptibility must be positive and finite, got {chi!r}")
    beta(T)
    chi_m = chi_to_molar_moment(chi, unit)
    # scale first so that tiny chi never meets k_B T in a subnormal product
    w = (2.0 * N_A * (g * MU_B) ** 2 / (K_B * T)) / chi_m - 3.0
    if w < 0:
        raise DataInconsistencyError(
            f"susceptibility {chi!r} ({unit}) at T = {T!r} K exceeds the paramagnetic ceiling (w = {w:.4g})"
        )
    return EffectiveBoltzmann(float(T), w)


@dataclass(frozen=True)
class SusceptibilityCurve:
    """Ordered ``(T, chi)`` samples in a declared unit system.

    ``chi`` is kept exactly as read; :meth:`chi_molar` applies the
    background subtraction and per-ion rescaling and converts to
    J T^-2 mol^-1 per mole of dimers.
    """

    T: tuple
    chi: tuple
    unit_system: str = "si"
    source: str = ""
    chi0: float = 0.0
    per_mole_of: str = "dimer"

    def __post_init__(self):
        T = tuple(float(t) for t in self.T)
        chi = tuple(float(c) for c in self.chi)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "chi", chi)
        if len(T) != len(chi):
            raise InvalidArgumentError("T and chi must have equal length")
        if not T:
            raise InvalidArgumentError("susceptibility curve is empty")
        if self.unit_system not in ("si", "cgs"):
            raise InvalidArgumentError(f"unit_system must be 'si' or 'cgs', got {self.unit_system!r}")
        if self.per_mole_of not in PER_MOLE_OF:
            raise InvalidArgumentError(f"per_mole_of must be one of {PER_MOLE_OF}")
        if any(not (t > 0) or not math.isfinite(t) for t in T):
            raise InvalidArgumentError("temperatures must be positive and finite")
        if any(not math.isfinite(c) for c in chi):
            raise InvalidArgumentError("susceptibilities must be finite")
        if any(b <= a for a, b in zip(T, T[1:])):
            raise InvalidArgumentError("temperatures must be strictly increasing")

    def __len__(self):
        return len(self.T)

    def chi_molar(self):
        scale = 2.0 if self.per_mole_of == "cu_ion" else 1.0
        return np.array([chi_to_molar_moment(scale * (c - self.chi0), self.unit_system) for c in self.chi])


def format_number(x):
    """17 significant digits: exact round trip for binary64."""
    return format(float(x), ".17g")


def _parse_field(text, lineno, name):
    try:
        v = float(text)
    except ValueError:
        raise ChiParseError(f"{name} field {text.strip()!r} is not a number", lineno) from None
    if not math.isfinite(v):
        raise ChiParseError(f"{name} field {text.strip()!r} is not finite", lineno)
    return v


def parse_chi_text(text, unit_system, source="", chi0=0.0, per_mole_of="dimer"):
    """Parse the ``T_K,chi`` CSV grammar from a string."""
    header_seen = False
    T, chi = [], []
    last_T = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [s.strip() for s in line.split(",")]
        if not header_seen:
            if parts != ["T_K", "chi"]:
                raise ChiParseError(f"expected header 'T_K,chi', got {line!r}", lineno)
            header_seen = True
            continue
        if len(parts) != 2:
            raise ChiParseError(f"expected 2 fields, got {len(parts)}", lineno)
        t = _parse_field(parts[0], lineno, "T_K")
        c = _parse_field(parts[1], lineno, "chi")
        if t <= 0:
            raise ChiParseError(f"temperature must be positive, got {t!r}", lineno)
        if last_T is not None and t <= last_T:
            raise ChiParseError(f"temperature {t!r} does not increase (previous {last_T!r})", lineno)
        last_T = t
        T.append(t)
        chi.append(c)
    if not header_seen:
        raise InvalidArgumentError(f"{source or 'input'}: no header line")
    if not T:
        raise InvalidArgumentError(f"{source or 'input'}: no data rows")
    return SusceptibilityCurve(tuple(T), tuple(chi), unit_system, source, chi0, per_mole_of)


def ingest_chi_csv(path, unit_system, chi0=0.0, per_mole_of="dimer"):
    """Read a susceptibility file.

    The unit system is declared by the caller and never inferred. ``chi0``
    is a constant background (e.g. diamagnetic) subtracted before use.
    """
    if unit_system not in ("si", "cgs"):
        raise InvalidArgumentError(f"unit_system must be 'si' or 'cgs', got {unit_system!r}")
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_chi_text(text, unit_system, str(path), chi0, per_mole_of)


def write_chi_csv(curve, dest=None):
    """Emit a curve in the input grammar; returns the text if ``dest`` is None."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T_K", "chi"])
    for t, c in zip(curve.T, curve.chi):
        w.writerow([format_number(t), format_number(c)])
    text = buf.getvalue()
    if dest is None:
        return text
    Path(dest).write_text(text, encoding="utf-8")
    return text


@dataclass(frozen=True)
class ChiRow:
    """Quantities reconstructed from one susceptibility sample.

    ``discord`` is ``ergotropy / (2 E0)``; ``concurrence`` uses the
    zero-field thermal relation ``max(0, (w - 3)/(w + 3))``. Rows whose
    inversion is unphysical carry NaN and a flag instead of raising.
    """

    T: float
    chi: float
    w: float
    ergotropy: ErgotropyResult | None
    discord: float
    concurrence: float
    eof: float
    flags: tuple = field(default=())

    @property
    def ok(self):
        return not self.flags


def correlations_from_chi(curve, p):
    """Per-row ergotropy, discord, concurrence and EoF from measured ``chi``.

    ``p`` supplies ``g`` and ``B_z`` (the ``E0`` scale) and ``J``, which
    enters the ergotropy readout through ``e^{beta J}``.
    """
    rows = []
    two_e0 = 2.0 * p.E0
    for T, raw, chi_m in zip(curve.T, curve.chi, curve.chi_molar()):
        flags = []
        erg = None
        discord = conc = eof = w = math.nan
        if not chi_m > 0:
            rows.append(ChiRow(T, raw, w, None, discord, conc, eof, ("non-positive susceptibility",)))
            continue
        with warnings.catch_warnings():
            # the excursion is recorded in erg.warnings and becomes a row flag
            warnings.simplefilter("ignore")
            erg = ergotropy_from_susceptibility(p, T, chi_m, strict=False)
        flags.extend(erg.warnings)
        discord = erg.per_molecule / two_e0 if two_e0 > 0 else 0.0
        if discord > 0.5:
            flags.append(f"discord estimate {discord:.6g} exceeds 1/2")
        try:
            eb = invert_chi(T, chi_m, p.g)
        except DataInconsistencyError as exc:
            flags.append(str(exc))
        else:
            w = eb.w
            if not eb.in_model_range:
                flags.append(f"w = {w:.6g} < 1 is outside the antiferromagnetic model")
            conc = max(0.0, (w - 3.0) / (w + 3.0))
            eof = entanglement_of_formation(conc)
        rows.append(ChiRow(T, raw, w, erg, discord, conc, eof, tuple(flags)))
    return rows


def estimate_entanglement_temperature(rows):
    """Temperature where the reconstructed ``w`` crosses 3 (linear in T).

    Returns NaN when the data never brackets the crossing.
    """
    pts = [(r.T, r.w) for r in rows if math.isfinite(r.w)]
    for (t0, w0), (t1, w1) in zip(pts, pts[1:]):
        if (w0 - 3.0) * (w1 - 3.0) <= 0 and w0 != w1:
            return t0 + (3.0 - w0) * (t1 - t0) / (w1 - w0)
    return math.nan


def chi_summary(rows, p):
    erg = [(r.ergotropy.per_mole, r.T) for r in rows if r.ergotropy is not None and r.ok]
    best = max(erg) if erg else (math.nan, math.nan)
    try:
        te_model = entanglement_temperature(p)
    except InvalidArgumentError:
        te_model = math.nan
    return {
        "entanglement_temperature_data_K": estimate_entanglement_temperature(rows),
        "entanglement_temperature_model_K": te_model,
        "max_ergotropy_J_per_mol": best[0],
        "max_ergotropy_T_K": best[1],
        "rows": len(rows),
        "flagged_rows": sum(1 for r in rows if not r.ok),
    }
