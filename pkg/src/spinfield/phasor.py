"""Rotating real 2-vector fields and their complex-wavefunction images.

A phasor field carries (fx, fy) at every grid point. The map
``(fx, fy) -> fx + i fy`` is the identification used throughout: modulus is the
vector length, phase is the rotation angle, a rotation of the plane by alpha
is multiplication by exp(i alpha), and reversing helicity (fy -> -fy) is
complex conjugation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegeneratePhaseError, DomainError, UsageError
from .grid import Grid1D, frozen

SPIN_AXIS = (0.0, 0.0, 1.0)


class Helicity(Enum):
    PLUS = 1
    MINUS = -1

    @property
    def sign(self) -> int:
        return self.value

    def flipped(self) -> Helicity:
        return Helicity.MINUS if self is Helicity.PLUS else Helicity.PLUS

    @classmethod
    def parse(cls, value) -> Helicity:
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        if text in ("+", "+1", "1", "plus"):
            return cls.PLUS
        if text in ("-", "-1", "minus"):
            return cls.MINUS
        raise UsageError(f"unknown helicity {value!r}")


@dataclass(frozen=True, eq=False)
class SpinField:
    grid: Grid1D
    fx: np.ndarray
    fy: np.ndarray
    helicity: Helicity = Helicity.PLUS
    spin_axis: tuple = field(default=SPIN_AXIS, init=False)

    def __post_init__(self):
        fx = frozen(self.fx, float)
        fy = frozen(self.fy, float)
        n = self.grid.n_points
        if fx.shape != (n,) or fy.shape != (n,):
            raise UsageError(f"components must have shape ({n},), got {fx.shape} and {fy.shape}")
        if not (np.all(np.isfinite(fx)) and np.all(np.isfinite(fy))):
            raise DomainError("field components must be finite")
        object.__setattr__(self, "fx", fx)
        object.__setattr__(self, "fy", fy)
        object.__setattr__(self, "helicity", Helicity.parse(self.helicity))

    @property
    def amplitude(self) -> np.ndarray:
        return np.hypot(self.fx, self.fy)

    def identical_to(self, other: SpinField) -> bool:
        """Bitwise equality of grid, components and helicity tag."""
        return (
            self.grid == other.grid
            and self.helicity is other.helicity
            and self.fx.tobytes() == other.fx.tobytes()
            and self.fy.tobytes() == other.fy.tobytes()
        )


@dataclass(frozen=True, eq=False)
class Wavefunction:
    grid: Grid1D
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        values = frozen(self.values, complex)
        if values.shape != (self.grid.n_points,):
            raise UsageError(f"values must have shape ({self.grid.n_points},), got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("wavefunction values must be finite")
        object.__setattr__(self, "values", values)
        if self.normalized and abs(self.norm() - 1.0) > 1e-10:
            raise UsageError(f"flagged normalized but norm is {self.norm()!r}")

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def degenerate_phase(self) -> np.ndarray:
        """Boolean mask of points where the phase is undefined (zero amplitude)."""
        return self.values == 0

    @property
    def phase(self) -> np.ndarray:
        """Pointwise phase in (-pi, pi]; zero where the amplitude vanishes."""
        theta = np.angle(self.values)
        theta[theta == -np.pi] = np.pi
        theta[self.degenerate_phase] = 0.0
        return theta

    def norm(self) -> float:
        return float(np.sqrt(self.grid.trapezoid(np.abs(self.values) ** 2).real))

    def normalize(self) -> Wavefunction:
        n = self.norm()
        if n == 0:
            raise DomainError("cannot normalize the zero wavefunction")
        return Wavefunction(self.grid, self.values / n, normalized=True)

    def identical_to(self, other: Wavefunction) -> bool:
        return self.grid == other.grid and self.values.tobytes() == other.values.tobytes()


def helical_wave(grid: Grid1D, amplitude: float, k: float, omega: float, t: float = 0.0,
                 helicity=Helicity.PLUS) -> SpinField:
    """Circularly polarized transverse wave travelling along z with spin along z."""
    if not amplitude >= 0:
        raise DomainError(f"amplitude must be non-negative, got {amplitude!r}")
    helicity = Helicity.parse(helicity)
    arg = k * grid.z - omega * t
    return SpinField(grid, amplitude * np.cos(arg), helicity.sign * amplitude * np.sin(arg), helicity)


def to_wavefunction(f: SpinField) -> Wavefunction:
    values = np.empty(f.grid.n_points, dtype=complex)
    # component-wise assignment keeps signed zeros bit-exact
    values.real = f.fx
    values.imag = f.fy
    return Wavefunction(f.grid, values)


def from_wavefunction(psi: Wavefunction, helicity=Helicity.PLUS) -> SpinField:
    return SpinField(psi.grid, psi.values.real, psi.values.imag, helicity)


def conjugate(psi: Wavefunction) -> Wavefunction:
    return Wavefunction(psi.grid, np.conj(psi.values), psi.normalized)


def helicity_flip(f: SpinField) -> SpinField:
    return SpinField(f.grid, f.fx, -f.fy, f.helicity.flipped())


def rotate(f: SpinField, alpha: float) -> SpinField:
    """Rigid rotation of every phasor by ``alpha`` about the spin axis."""
    c, s = np.cos(alpha), np.sin(alpha)
    return SpinField(f.grid, c * f.fx - s * f.fy, s * f.fx + c * f.fy, f.helicity)


def phase_profile(f: SpinField) -> np.ndarray:
    """Rotation angle along z, unwrapped left to right so adjacent jumps are <= pi."""
    zero = np.flatnonzero((f.fx == 0) & (f.fy == 0))
    if zero.size:
        raise DegeneratePhaseError(zero)
    theta = np.arctan2(f.fy, f.fx)
    if theta[0] == -np.pi:
        theta[0] = np.pi
    return np.unwrap(theta)


def phase_slope(f: SpinField) -> float:
    """Least-squares slope d(theta)/dz of the unwrapped phase profile."""
    theta = phase_profile(f)
    z = f.grid.z
    zc = z - z.mean()
    return float(np.dot(zc, theta - theta.mean()) / np.dot(zc, zc))
