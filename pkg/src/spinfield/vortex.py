"""Closed-form observables of an array of rigidly rotating cylindrical vortices.

Each vortex is a uniform solid cylinder (moment of inertia m R^2 / 2) of radius
R and angular velocity omega. Charge is split across vortices in the same
proportions as mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DomainError, UsageError
from .grid import Grid1D, frozen
from .phasor import SpinField
from .units import CODATA2018, Constants, compton_radius, rotation_frequency

CHARGE_PARTITION = "proportional_to_mass"


@dataclass(frozen=True, eq=False)
class VortexArray:
    n_vortices: int
    total_mass: float  # kg
    total_charge: float  # C
    radius: float  # m
    omega: float  # rad/s
    weights: np.ndarray | None = None
    canonical: bool = False
    charge_partition: str = CHARGE_PARTITION

    def __post_init__(self):
        if int(self.n_vortices) != self.n_vortices or self.n_vortices < 1:
            raise DomainError(f"n_vortices must be a positive integer, got {self.n_vortices!r}")
        object.__setattr__(self, "n_vortices", int(self.n_vortices))
        for name in ("total_mass", "radius", "omega"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive, got {value!r}")
        if not math.isfinite(self.total_charge):
            raise DomainError("total_charge must be finite")
        if self.weights is not None:
            w = frozen(self.weights, float)
            if w.shape != (self.n_vortices,):
                raise UsageError(f"expected {self.n_vortices} weights, got shape {w.shape}")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise DomainError("weights must be finite and non-negative")
            if abs(w.sum() - 1.0) > 1e-12:
                raise DomainError(f"weights must sum to 1, got {w.sum()!r}")
            object.__setattr__(self, "weights", w)

    @classmethod
    def canonical_array(cls, n_vortices: int, mass: float | None = None, charge: float | None = None,
                        weights=None, constants: Constants = CODATA2018) -> VortexArray:
        """Array whose radius is the Compton radius and whose rate is m c^2 / hbar."""
        mass = constants.electron_mass if mass is None else mass
        charge = constants.elementary_charge if charge is None else charge
        return cls(
            n_vortices=n_vortices,
            total_mass=mass,
            total_charge=charge,
            radius=compton_radius(mass, constants),
            omega=rotation_frequency(mass, constants).angular,
            weights=weights,
            canonical=True,
        )

    @property
    def fractions(self) -> np.ndarray:
        if self.weights is None:
            return np.full(self.n_vortices, 1.0 / self.n_vortices)
        return self.weights

    @property
    def equatorial_speed(self) -> float:
        return self.radius * self.omega


def vortex_angular_momentum(arr: VortexArray, index: int) -> float:
    """Angular momentum I*omega of one vortex, in J s."""
    if not 0 <= index < arr.n_vortices:
        raise UsageError(f"vortex index {index} out of range for N={arr.n_vortices}")
    if arr.weights is None:
        mass = arr.total_mass / arr.n_vortices
    else:
        mass = arr.weights[index] * arr.total_mass
    return 0.5 * mass * arr.radius**2 * arr.omega


def total_spin(arr: VortexArray) -> float:
    # sum the per-vortex fractions first; the common factor is exact for every N
    return 0.5 * float(arr.fractions.sum()) * arr.total_mass * arr.radius**2 * arr.omega


def magnetic_moment(arr: VortexArray) -> float:
    """Sum of current-loop moments i_v * A_v with i_v = q_v omega / 2 pi, A_v = pi R^2."""
    currents = arr.fractions * arr.total_charge * arr.omega / (2.0 * math.pi)
    area = math.pi * arr.radius**2
    return float(currents.sum()) * area


@dataclass(frozen=True, eq=False)
class DensityField:
    grid: Grid1D
    rho: np.ndarray

    @property
    def positions(self) -> np.ndarray:
        return self.grid.z

    def integral(self) -> float:
        return float(self.grid.trapezoid(self.rho))


def density_from_field(field: SpinField) -> DensityField:
    """Relative mass density proportional to the squared phasor length, unit integral."""
    rho = field.fx**2 + field.fy**2
    total = field.grid.trapezoid(rho)
    if not total > 0:
        raise DegenerateInputError("field amplitude vanishes on the whole grid")
    return DensityField(field.grid, frozen(rho / total))
