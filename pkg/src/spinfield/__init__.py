"""Coherent-vortex model of electron spin: observables, phasor fields and their dynamics."""

__version__ = "0.1.0"

from .boundstates import BoxSpec, EigenResult, analytic_energy, analytic_state, numeric_eigensolve
from .boundstates import stationarity_check
from .dynamics import (
    Boundary,
    EvolutionConfig,
    Hamiltonian1D,
    apply_hamiltonian,
    dispersion_relation,
    evolve,
    evolve_real_pair,
)
from .grid import Grid1D
from .phasor import (
    Helicity,
    SpinField,
    Wavefunction,
    conjugate,
    from_wavefunction,
    helical_wave,
    helicity_flip,
    phase_profile,
    to_wavefunction,
)
from .relativity import Boost, Event, FourMomentum, boost_momentum, de_broglie_wavelength
from .relativity import invariant_phase_check, phase
from .units import CODATA2018, Constants, UnitSystem, compton_radius, convert
from .units import momentum_transfer_scale, rotation_frequency
from .vortex import VortexArray, density_from_field, magnetic_moment, total_spin
from .vortex import vortex_angular_momentum
