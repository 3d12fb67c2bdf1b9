"""Lorentz-invariant phase of the rotating field, in natural units (hbar = c = 1).

Sign convention: a :class:`Boost` with velocity ``beta`` takes coordinates to
the frame in which a particle at rest in the original frame moves with
velocity ``+beta``; that frame itself moves with ``-beta``. Events and
four-momenta are transformed with the same matrix, so the inner product
``E t - p z`` is preserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


from .errors import DomainError
from .grid import Grid1D
from .phasor import Helicity, SpinField, helical_wave


@dataclass(frozen=True)
class FourMomentum:
    energy: float
    momentum: float

    def __post_init__(self):
        if not (math.isfinite(self.energy) and math.isfinite(self.momentum)):
            raise DomainError("four-momentum components must be finite")
        if not self.energy > 0:
            raise DomainError(f"energy must be positive, got {self.energy!r}")

    @property
    def invariant_mass_squared(self) -> float:
        return (self.energy - self.momentum) * (self.energy + self.momentum)

    @property
    def mass(self) -> float:
        m2 = self.invariant_mass_squared
        if m2 < 0:
            raise DomainError("spacelike four-momentum")
        return math.sqrt(m2)

    def is_on_shell(self, mass: float, rtol: float = 1e-12) -> bool:
        return abs(self.invariant_mass_squared - mass * mass) <= rtol * mass * mass


@dataclass(frozen=True)
class Event:
    t: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.z)):
            raise DomainError("event coordinates must be finite")


@dataclass(frozen=True)
class Boost:
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and abs(self.beta) < 1):
            raise DomainError(f"|beta| must be < 1, got {self.beta!r}")

    @property
    def gamma(self) -> float:
        # factored form avoids cancellation in 1 - beta^2 near beta = 0
        return 1.0 / math.sqrt((1.0 - self.beta) * (1.0 + self.beta))

    def inverse(self) -> Boost:
        return Boost(-self.beta)

    def event(self, ev: Event) -> Event:
        g, b = self.gamma, self.beta
        return Event(g * (ev.t + b * ev.z), g * (ev.z + b * ev.t))

    def four_momentum(self, p: FourMomentum) -> FourMomentum:
        g, b = self.gamma, self.beta
        return FourMomentum(g * (p.energy + b * p.momentum), g * (p.momentum + b * p.energy))


def boost_momentum(mass: float, boost: Boost) -> FourMomentum:
    """Energy gamma*m and momentum gamma*m*beta of a particle moving at ``beta``."""
    if not mass > 0:
        raise DomainError(f"mass must be positive, got {mass!r}")
    g = boost.gamma
    return FourMomentum(g * mass, g * mass * boost.beta)


def phase(p: FourMomentum, ev: Event) -> float:
    """theta = E t - p z (radians, hbar = 1)."""
    return p.energy * ev.t - p.momentum * ev.z


@dataclass(frozen=True)
class PhaseCheck:
    theta_rest: float
    theta_boosted: float

    @property
    def difference(self) -> float:
        return self.theta_boosted - self.theta_rest


def invariant_phase_check(mass: float, boost: Boost, ev: Event) -> PhaseCheck:
    """Phase at an event in the rest frame and at the same event seen from ``boost``."""
    rest = FourMomentum(mass, 0.0)
    theta_rest = phase(rest, ev)
    theta_boosted = phase(boost_momentum(mass, boost), boost.event(ev))
    return PhaseCheck(theta_rest, theta_boosted)


def de_broglie_wavelength(p: FourMomentum) -> float:
    """2 pi / |p|: spatial period of the boosted phase."""
    if p.momentum == 0:
        raise DomainError("zero momentum: the rest-frame phase has no spatial period")
    return 2.0 * math.pi / abs(p.momentum)


def boosted_field(mass: float, boost: Boost, grid: Grid1D, t: float = 0.0,
                  amplitude: float = 1.0) -> SpinField:
    """Rest-frame rotating field seen from ``boost``: a helix with wavenumber p."""
    p = boost_momentum(mass, boost)
    return helical_wave(grid, amplitude, p.momentum, p.energy, t, Helicity.PLUS)

