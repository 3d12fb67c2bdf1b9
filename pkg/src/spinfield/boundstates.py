"""Particle in a box: analytic standing-wave states and a finite-difference cross-check.

Natural units (hbar = c = 1). States are normalized to unit L2 norm, so the
analytic envelope is sqrt(2/L) sin(n pi z / L). The helicity sign follows the
travelling-wave convention: PLUS maps onto psi_n = envelope * exp(-i omega_n t),
MINUS onto its complex conjugate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import Boundary, EvolutionConfig, Hamiltonian1D, evolve, fit_angular_frequency
from .errors import DomainError, UsageError
from .grid import Grid1D, frozen
from .phasor import Helicity, SpinField, Wavefunction
from .tridiag import bisect_ldl, inverse_iteration, positive_definite_shift


@dataclass(frozen=True)
class BoxSpec:
    length: float
    n: int = 1
    helicity: Helicity = Helicity.PLUS
    mass: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0):
            raise DomainError(f"box length must be positive, got {self.length!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"quantum number must be an integer >= 1, got {self.n!r}")
        if not self.mass > 0:
            raise DomainError("mass must be positive")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "helicity", Helicity.parse(self.helicity))

    def grid(self, n_points: int) -> Grid1D:
        return Grid1D(0.0, self.length, n_points)

    def hamiltonian(self, grid: Grid1D, include_rest: bool = True, potential=None) -> Hamiltonian1D:
        return Hamiltonian1D(grid, potential, self.mass, include_rest, Boundary.DIRICHLET)


def analytic_energy(spec: BoxSpec, include_rest: bool = True) -> float:
    kinetic = (spec.n * math.pi / spec.length) ** 2 / (2.0 * spec.mass)
    return kinetic + (spec.mass if include_rest else 0.0)


def discrete_energy(spec: BoxSpec, grid: Grid1D, include_rest: bool = True) -> float:
    """Exact eigenvalue of the 3-point Dirichlet Laplacian on ``grid``."""
    dz = grid.spacing
    # 1 - cos(x) = 2 sin^2(x/2) avoids cancellation
    kinetic = 2.0 * math.sin(0.5 * spec.n * math.pi * dz / spec.length) ** 2 / (spec.mass * dz * dz)
    return kinetic + (spec.mass if include_rest else 0.0)


class BoxState(NamedTuple):
    psi: Wavefunction
    field: SpinField


def _check_spans(spec: BoxSpec, grid: Grid1D):
    tol = 1e-12 * spec.length
    if abs(grid.z_min) > tol or abs(grid.z_max - spec.length) > tol:
        raise UsageError(f"grid {grid} does not span the box [0, {spec.length}]")


def envelope(spec: BoxSpec, grid: Grid1D) -> np.ndarray:
    _check_spans(spec, grid)
    env = math.sqrt(2.0 / spec.length) * np.sin(spec.n * math.pi * grid.z / spec.length)
    env[0] = 0.0
    env[-1] = 0.0
    return env


def analytic_state(spec: BoxSpec, t: float, grid: Grid1D) -> BoxState:
    env = envelope(spec, grid)
    omega = analytic_energy(spec, include_rest=True)
    c, s = math.cos(omega * t), math.sin(omega * t)
    sign = spec.helicity.sign
    fx = env * c
    fy = -sign * env * s
    field = SpinField(grid, fx, fy, spec.helicity)
    values = np.empty(grid.n_points, dtype=complex)
    values.real = fx
    values.imag = fy
    return BoxState(Wavefunction(grid, values), field)


@dataclass(frozen=True, eq=False)
class EigenResult:
    grid: Grid1D
    energies: np.ndarray
    states: np.ndarray  # (n_states, n_points), walls included, unit trapezoid norm
    residuals: np.ndarray  # ||H psi - E psi|| / |E|
    iterations: np.ndarray
    rest_energy: float = 0.0

    def overlaps(self) -> np.ndarray:
        return (self.states * _weights(self.grid)) @ self.states.T

    def wavefunction(self, i: int) -> Wavefunction:
        return Wavefunction(self.grid, self.states[i])

    def node_counts(self) -> list[int]:
        counts = []
        for state in self.states:
            interior = state[1:-1]
            scale = np.abs(interior).max()
            signs = np.sign(interior[np.abs(interior) > 1e-10 * scale])
            counts.append(int(np.count_nonzero(signs[1:] != signs[:-1])))
        return counts


def numeric_eigensolve(h: Hamiltonian1D, n_states: int) -> EigenResult:
    """Lowest eigenpairs by Sturm bisection plus inverse iteration.

    The rest-energy shift is added to the eigenvalues afterwards; the kinetic
    plus potential matrix is what gets bisected.
    """
    if h.boundary is not Boundary.DIRICHLET:
        raise UsageError("numeric_eigensolve needs Dirichlet walls")
    n_interior = h.grid.n_points - 2
    if int(n_states) != n_states or not 1 <= n_states <= n_interior:
        raise UsageError(f"n_states must be in [1, {n_interior}], got {n_states!r}")
    kin = h.without_rest_energy()
    diag, off = kin.tridiagonal()
    shift, d, l, upper = positive_definite_shift(diag, off)
    pivmin = np.finfo(float).tiny * max(1.0, float((off * off).max()))
    energies, vectors, iters = [], [], []
    for i in range(n_states):
        e = shift + bisect_ldl(d, l, i, 0.0, upper, pivmin)
        v, _, it = inverse_iteration(diag, off, e, previous=vectors)
        energies.append(e)
        vectors.append(v)
        iters.append(it)
    dz = h.grid.spacing
    states = np.zeros((n_states, h.grid.n_points))
    residuals = np.empty(n_states)
    for i, (e, v) in enumerate(zip(energies, vectors)):
        if v[0] < 0:
            v = -v
        state = np.zeros(h.grid.n_points)
        state[1:-1] = v / math.sqrt(dz)
        states[i] = state
        r = kin.apply(state) - e * state
        residuals[i] = kin.norm(r) / max(abs(e), np.finfo(float).tiny)
    rest = h.rest_energy
    return EigenResult(
        grid=h.grid,
        energies=frozen(np.asarray(energies) + rest),
        states=frozen(states),
        residuals=frozen(residuals),
        iterations=frozen(iters),
        rest_energy=rest,
    )


@dataclass(frozen=True)
class StationarityReport:
    n: int
    modulus_drift: float
    omega_fitted: float
    omega_expected: float

    @property
    def relative_error(self) -> float:
        return abs(self.omega_fitted - self.omega_expected) / abs(self.omega_expected)

    def stationary(self, tol: float = 1e-8) -> bool:
        return self.modulus_drift < tol


@dataclass(frozen=True)
class BeatReport:
    modes: tuple[int, int]
    modulus_drift: float
    beat_measured: float
    beat_expected: float

    @property
    def relative_error(self) -> float:
        return abs(self.beat_measured - self.beat_expected) / abs(self.beat_expected)


def _max_modulus_drift(states: np.ndarray) -> float:
    mod = np.abs(states)
    return float(np.max(np.abs(mod - mod[0])))


def stationarity_check(spec: BoxSpec, grid: Grid1D, cfg: EvolutionConfig) -> StationarityReport:
    """Evolve numeric state ``spec.n`` and measure modulus drift and phase rotation rate."""
    _check_spans(spec, grid)
    h = spec.hamiltonian(grid, include_rest=True)
    eig = numeric_eigensolve(h, spec.n)
    psi0 = eig.wavefunction(spec.n - 1)
    traj = evolve(h, psi0, cfg)
    states = traj.lab_frame()
    overlap = states @ (psi0.values * _weights(grid))
    return StationarityReport(
        n=spec.n,
        modulus_drift=_max_modulus_drift(states),
        omega_fitted=fit_angular_frequency(traj.times, overlap),
        omega_expected=float(eig.energies[spec.n - 1]),
    )


def beat_check(spec: BoxSpec, grid: Grid1D, cfg: EvolutionConfig, modes=(1, 2)) -> BeatReport:
    """Evolve an equal superposition of two numeric states and recover their beat frequency."""
    _check_spans(spec, grid)
    a, b = modes
    if a == b:
        raise UsageError("beat needs two distinct modes")
    h = spec.hamiltonian(grid, include_rest=True)
    eig = numeric_eigensolve(h, max(a, b))
    sa, sb = eig.states[a - 1], eig.states[b - 1]
    psi0 = Wavefunction(grid, (sa + sb) / math.sqrt(2.0))
    traj = evolve(h, psi0, cfg)
    states = traj.lab_frame()
    w = _weights(grid)
    ca = states @ (sa * w)
    cb = states @ (sb * w)
    # relative phase of the two components drives the modulus beat
    beat = fit_angular_frequency(traj.times, cb * np.conj(ca))
    return BeatReport(
        modes=(a, b),
        modulus_drift=_max_modulus_drift(states),
        beat_measured=beat,
        beat_expected=float(eig.energies[b - 1] - eig.energies[a - 1]),
    )


def _weights(grid: Grid1D) -> np.ndarray:
    w = np.full(grid.n_points, grid.spacing)
    w[0] = w[-1] = 0.5 * grid.spacing
    return w
