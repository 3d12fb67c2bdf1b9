"""Physical constants, unit systems and the model's closed-form scale predictions.

Natural units here mean hbar = m = c = e = 1 for a chosen reference particle
mass m. One length unit is then the Compton radius hbar/(m c), one time unit
is hbar/(m c^2) and one magnetic-moment unit is e hbar/m (twice the Bohr
magneton of that particle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .errors import DomainError, UsageError


@dataclass(frozen=True)
class Constants:
    """Fundamental constants in SI units. hbar is derived from the exact h."""

    planck: float  # J s
    c: float  # m/s
    electron_mass: float  # kg
    elementary_charge: float  # C
    electron_volt: float  # J per eV

    def __post_init__(self):
        for name in ("planck", "c", "electron_mass", "elementary_charge", "electron_volt"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")

    @property
    def h(self) -> float:
        return self.planck

    @property
    def hbar(self) -> float:
        return self.planck / (2.0 * math.pi)

    @property
    def bohr_magneton(self) -> float:
        return self.elementary_charge * self.hbar / (2.0 * self.electron_mass)

    def as_dict(self) -> dict:
        return {
            "h_J_s": self.planck,
            "hbar_J_s": self.hbar,
            "c_m_per_s": self.c,
            "electron_mass_kg": self.electron_mass,
            "elementary_charge_C": self.elementary_charge,
            "electron_volt_J": self.electron_volt,
            "electron_rest_energy_MeV": ELECTRON_REST_ENERGY_MEV,
        }


CODATA2018 = Constants(
    planck=6.62607015e-34,
    c=299792458.0,
    electron_mass=9.1093837015e-31,
    elementary_charge=1.602176634e-19,
    electron_volt=1.602176634e-19,
)

# particle-physics convention for MeV/c reporting
ELECTRON_REST_ENERGY_MEV = 0.51099895

QUANTITY_KINDS = (
    "length",
    "time",
    "mass",
    "energy",
    "momentum",
    "angular_momentum",
    "magnetic_moment",
)


class Mode(str, Enum):
    SI = "SI"
    NATURAL = "Natural"

    @classmethod
    def _missing_(cls, value):
        for member in cls:
            if isinstance(value, str) and member.value.lower() == value.strip().lower():
                return member
        return None


@dataclass(frozen=True)
class UnitSystem:
    """Either SI or natural units scaled to a reference mass in kg."""

    mode: Mode = Mode.SI
    scale: float | None = None
    constants: Constants = CODATA2018

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.NATURAL:
            if self.scale is None or not (math.isfinite(self.scale) and self.scale > 0):
                raise DomainError("natural units need a positive reference mass")
        elif self.scale is not None:
            raise UsageError("SI unit system takes no scale")

    @classmethod
    def si(cls, constants: Constants = CODATA2018) -> UnitSystem:
        return cls(Mode.SI, None, constants)

    @classmethod
    def natural(cls, mass: float | None = None, constants: Constants = CODATA2018) -> UnitSystem:
        return cls(Mode.NATURAL, constants.electron_mass if mass is None else mass, constants)

    def unit_in_si(self, kind: str) -> float:
        """SI value of one unit of ``kind`` in this system."""
        kind = _check_kind(kind)
        if self.mode is Mode.SI:
            return 1.0
        k, m = self.constants, self.scale
        return {
            "length": k.hbar / (m * k.c),
            "time": k.hbar / (m * k.c * k.c),
            "mass": m,
            "energy": m * k.c * k.c,
            "momentum": m * k.c,
            "angular_momentum": k.hbar,
            "magnetic_moment": k.elementary_charge * k.hbar / m,
        }[kind]


def _check_kind(kind: str) -> str:
    normalized = str(kind).strip().lower().replace(" ", "_").replace("-", "_")
    if normalized not in QUANTITY_KINDS:
        raise UsageError(f"unknown quantity kind {kind!r}; expected one of {QUANTITY_KINDS}")
    return normalized


def convert(value, kind: str, source: UnitSystem, target: UnitSystem):
    """Convert ``value`` of quantity ``kind`` from ``source`` to ``target`` units.

    Works on scalars and numpy arrays alike.
    """
    kind = _check_kind(kind)
    if source == target:
        return value
    return value * (source.unit_in_si(kind) / target.unit_in_si(kind))


def _check_mass(mass: float) -> float:
    if not (math.isfinite(mass) and mass > 0):
        raise DomainError(f"mass must be positive and finite, got {mass!r}")
    return float(mass)


def compton_radius(mass: float, constants: Constants = CODATA2018) -> float:
    """Reduced Compton wavelength hbar/(m c) in metres: the vortex radius cutoff."""
    mass = _check_mass(mass)
    return constants.hbar / (mass * constants.c)


class RotationFrequency(NamedTuple):
    angular: float  # rad/s
    cyclic: float  # Hz


def rotation_frequency(mass: float, constants: Constants = CODATA2018) -> RotationFrequency:
    mass = _check_mass(mass)
    angular = mass * constants.c**2 / constants.hbar
    return RotationFrequency(angular, angular / (2.0 * math.pi))


class MomentumScale(NamedTuple):
    si: float  # kg m/s
    mev_per_c: float


def momentum_transfer_scale(mass: float, constants: Constants = CODATA2018) -> MomentumScale:
    """Momentum pi*m*c associated with a spatial period of two Compton radii."""
    mass = _check_mass(mass)
    si = math.pi * mass * constants.c
    mev = math.pi * (mass / constants.electron_mass) * ELECTRON_REST_ENERGY_MEV
    return MomentumScale(si, mev)


def joules_to_ev(energy: float, constants: Constants = CODATA2018) -> float:
    return energy / constants.electron_volt
