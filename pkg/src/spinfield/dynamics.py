"""Schroedinger evolution with the rest-energy term, in natural units (hbar = c = 1).

Two integrators are provided. :func:`evolve` advances a complex wavefunction
with Crank-Nicolson. :func:`evolve_real_pair` advances the real phasor
components (fx, fy) with the same implicit midpoint rule written entirely in
real 2x2 block arithmetic:

    d fx/dt = +H fy,    d fy/dt = -H fx

Grids: with Dirichlet walls the first and last grid points are the walls and
hold zero. With periodic boundaries the n grid points are one full period, so
the period length is ``n * dz`` and the last point neighbours the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InstabilityError, UsageError
from .grid import Grid1D, frozen
from .phasor import Helicity, SpinField, Wavefunction
from .tridiag import (
    BlockTridiagonalSolver,
    CyclicBlockTridiagonalSolver,
    CyclicTridiagonalSolver,
    TridiagonalSolver,
)

_ROTATOR = np.array([[0.0, 1.0], [-1.0, 0.0]])


class Boundary(str, Enum):
    DIRICHLET = "Dirichlet"
    PERIODIC = "Periodic"


@dataclass(frozen=True, eq=False)
class Hamiltonian1D:
    grid: Grid1D
    potential: np.ndarray | None = None
    mass: float = 1.0
    include_rest_energy: bool = True
    boundary: Boundary = Boundary.DIRICHLET

    def __post_init__(self):
        n = self.grid.n_points
        if n < 3:
            raise UsageError("the Hamiltonian needs at least 3 grid points")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise DomainError(f"mass must be positive, got {self.mass!r}")
        v = np.zeros(n) if self.potential is None else np.asarray(self.potential, dtype=float)
        if v.shape != (n,):
            raise UsageError(f"potential must have shape ({n},), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("potential must be finite")
        object.__setattr__(self, "potential", frozen(v))
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def hopping(self) -> float:
        """Magnitude of the off-diagonal kinetic entry, 1 / (2 m dz^2)."""
        return 1.0 / (2.0 * self.mass * self.grid.spacing**2)

    @property
    def rest_energy(self) -> float:
        return self.mass if self.include_rest_energy else 0.0

    @property
    def diagonal(self) -> np.ndarray:
        return 2.0 * self.hopping + self.potential + self.rest_energy

    def without_rest_energy(self) -> Hamiltonian1D:
        return Hamiltonian1D(self.grid, self.potential, self.mass, False, self.boundary)

    def with_rest_energy(self, include: bool) -> Hamiltonian1D:
        return Hamiltonian1D(self.grid, self.potential, self.mass, include, self.boundary)

    @property
    def active(self) -> slice:
        """Grid points that are unknowns of the linear system."""
        return slice(1, -1) if self.boundary is Boundary.DIRICHLET else slice(None)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """H applied to a real or complex grid array; wall points map to zero."""
        t = self.hopping
        d = self.diagonal
        if self.boundary is Boundary.PERIODIC:
            return d * values - t * (np.roll(values, 1) + np.roll(values, -1))
        v = values.copy()
        v[0] = 0.0
        v[-1] = 0.0
        out = np.zeros_like(values)
        out[1:-1] = d[1:-1] * v[1:-1] - t * (v[:-2] + v[2:])
        return out

    def inner(self, a, b) -> complex:
        """<a, b> with the trapezoid rule (periodic: the closed-period trapezoid)."""
        prod = np.conj(a) * b
        dz = self.grid.spacing
        if self.boundary is Boundary.PERIODIC:
            return complex(dz * prod.sum())
        return complex(self.grid.trapezoid(prod))

    def norm(self, values) -> float:
        return math.sqrt(self.inner(values, values).real)

    def expectation(self, values) -> float:
        return self.inner(values, self.apply(values)).real / self.inner(values, values).real

    def tridiagonal(self):
        """(diag, off) of the symmetric matrix acting on the active points."""
        d = self.diagonal[self.active].copy()
        off = np.full(d.size - 1, -self.hopping)
        return d, off


def apply_hamiltonian(h: Hamiltonian1D, psi: Wavefunction) -> Wavefunction:
    h.grid.check_same(psi.grid)
    return Wavefunction(psi.grid, h.apply(psi.values))


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    n_steps: int
    scheme: str = "CrankNicolson"
    interaction_picture: bool = False
    save_every: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise UsageError(f"n_steps must be a positive integer, got {self.n_steps!r}")
        if self.scheme != "CrankNicolson":
            raise UsageError(f"unsupported scheme {self.scheme!r}")
        if int(self.save_every) != self.save_every or self.save_every < 1:
            raise UsageError("save_every must be a positive integer")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Saved states of a complex evolution.

    With ``interaction_picture`` the stored states are envelopes; the
    laboratory-frame state is ``envelope * exp(-i m t)``.
    """

    grid: Grid1D
    times: np.ndarray
    states: np.ndarray  # (n_saved, n_points) complex
    norms: np.ndarray  # norm after every step, length n_steps + 1
    dt: float
    interaction_picture: bool = False
    rest_energy: float = 0.0

    def __len__(self):
        return self.states.shape[0]

    def wavefunction(self, i: int) -> Wavefunction:
        return Wavefunction(self.grid, self.states[i])

    def lab_frame(self) -> np.ndarray:
        if not self.interaction_picture:
            return self.states
        return self.states * np.exp(-1j * self.rest_energy * self.times)[:, None]

    @property
    def final(self) -> Wavefunction:
        return self.wavefunction(-1)


@dataclass(frozen=True, eq=False)
class FieldTrajectory:
    """Saved phasor fields of a real-pair evolution; envelopes as in :class:`Trajectory`."""

    grid: Grid1D
    times: np.ndarray
    fx: np.ndarray  # (n_saved, n_points)
    fy: np.ndarray
    norms: np.ndarray
    dt: float
    helicity: Helicity = Helicity.PLUS
    interaction_picture: bool = False
    rest_energy: float = 0.0

    def __len__(self):
        return self.fx.shape[0]

    def at(self, i: int) -> SpinField:
        return SpinField(self.grid, self.fx[i], self.fy[i], self.helicity)

    def lab_frame(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.interaction_picture:
            return self.fx, self.fy
        # (fx + i fy) * exp(-i sign m t)
        t = self.times[:, None]
        c = np.cos(self.rest_energy * t)
        s = self.helicity.sign * np.sin(self.rest_energy * t)
        return c * self.fx + s * self.fy, c * self.fy - s * self.fx


def _check_walls(h: Hamiltonian1D, values: np.ndarray) -> np.ndarray:
    values = np.array(values, copy=True)
    if h.boundary is Boundary.DIRICHLET:
        scale = max(float(np.max(np.abs(values))), 1e-300)
        if max(abs(values[0]), abs(values[-1])) > 1e-12 * scale:
            raise UsageError("Dirichlet evolution needs a state that vanishes at the walls")
        values[0] = 0.0
        values[-1] = 0.0
    return values


def _save_indices(cfg: EvolutionConfig) -> list[int]:
    idx = list(range(0, cfg.n_steps + 1, cfg.save_every))
    if idx[-1] != cfg.n_steps:
        idx.append(cfg.n_steps)
    return idx


def _complex_solver(h: Hamiltonian1D, dt: float):
    d, off = h.tridiagonal()
    a = 0.5j * dt
    diag = 1.0 + a * d
    lower = np.concatenate([[0.0], a * off]).astype(complex)
    upper = np.concatenate([a * off, [0.0]]).astype(complex)
    if h.boundary is Boundary.PERIODIC:
        corner = -a * h.hopping
        return CyclicTridiagonalSolver(lower, diag, upper, corner, corner)
    return TridiagonalSolver(lower, diag, upper)


def evolve(h: Hamiltonian1D, psi0: Wavefunction, cfg: EvolutionConfig) -> Trajectory:
    """Crank-Nicolson: (1 + i H dt/2) psi_{n+1} = (1 - i H dt/2) psi_n."""
    h.grid.check_same(psi0.grid)
    step_h = h.without_rest_energy() if cfg.interaction_picture else h
    solver = _complex_solver(step_h, cfg.dt)
    act = step_h.active
    psi = _check_walls(h, psi0.values).astype(complex)
    saves = set(_save_indices(cfg))
    states, times = [psi.copy()], [0.0]
    norms = np.empty(cfg.n_steps + 1)
    norms[0] = step_h.norm(psi)
    for step in range(1, cfg.n_steps + 1):
        rhs = psi - 0.5j * cfg.dt * step_h.apply(psi)
        psi[act] = solver.solve(rhs[act])
        if not np.all(np.isfinite(psi)):
            raise InstabilityError(f"non-finite state after step {step}")
        norms[step] = step_h.norm(psi)
        if step in saves:
            states.append(psi.copy())
            times.append(step * cfg.dt)
    return Trajectory(
        grid=h.grid,
        times=frozen(times),
        states=frozen(states),
        norms=frozen(norms),
        dt=cfg.dt,
        interaction_picture=cfg.interaction_picture and h.include_rest_energy,
        rest_energy=h.rest_energy,
    )


def _block_solver(h: Hamiltonian1D, dt: float, sign: int):
    d, off = h.tridiagonal()
    n = d.size
    a = 0.5 * dt
    rot = sign * _ROTATOR
    diag = np.eye(2)[None, :, :] - a * d[:, None, None] * rot
    off_block = -a * (-h.hopping) * rot
    lower = np.broadcast_to(off_block, (n, 2, 2)).copy()
    upper = lower.copy()
    lower[0] = 0.0
    upper[-1] = 0.0
    if h.boundary is Boundary.PERIODIC:
        return CyclicBlockTridiagonalSolver(lower, diag, upper, off_block, off_block)
    return BlockTridiagonalSolver(lower, diag, upper)


def evolve_real_pair(h: Hamiltonian1D, field0: SpinField, cfg: EvolutionConfig) -> FieldTrajectory:
    """Implicit midpoint rule for the coupled real system, without complex arithmetic.

    A Plus field obeys d fx/dt = H fy, d fy/dt = -H fx, so fx + i fy follows
    the Schrodinger equation; a Minus field rotates the other way and its
    image is the complex conjugate.
    """
    h.grid.check_same(field0.grid)
    step_h = h.without_rest_energy() if cfg.interaction_picture else h
    sign = field0.helicity.sign
    solver = _block_solver(step_h, cfg.dt, sign)
    act = step_h.active
    fx = _check_walls(h, field0.fx)
    fy = _check_walls(h, field0.fy)
    saves = set(_save_indices(cfg))
    xs, ys, times = [fx.copy()], [fy.copy()], [0.0]
    norms = np.empty(cfg.n_steps + 1)
    norms[0] = math.sqrt(step_h.inner(fx, fx).real + step_h.inner(fy, fy).real)
    a = 0.5 * cfg.dt * sign
    for step in range(1, cfg.n_steps + 1):
        rhs = np.stack([fx + a * step_h.apply(fy), fy - a * step_h.apply(fx)], axis=-1)
        new = solver.solve(rhs[act])
        fx[act] = new[:, 0]
        fy[act] = new[:, 1]
        if not (np.all(np.isfinite(fx)) and np.all(np.isfinite(fy))):
            raise InstabilityError(f"non-finite field after step {step}")
        norms[step] = math.sqrt(step_h.inner(fx, fx).real + step_h.inner(fy, fy).real)
        if step in saves:
            xs.append(fx.copy())
            ys.append(fy.copy())
            times.append(step * cfg.dt)
    return FieldTrajectory(
        grid=h.grid,
        times=frozen(times),
        fx=frozen(xs),
        fy=frozen(ys),
        norms=frozen(norms),
        dt=cfg.dt,
        helicity=field0.helicity,
        interaction_picture=cfg.interaction_picture and h.include_rest_energy,
        rest_energy=h.rest_energy,
    )


def dispersion_relation(k, mass: float = 1.0, include_rest: bool = True):
    """omega(k) = k^2 / 2m (+ m), natural units."""
    k = np.asarray(k, dtype=float) if np.ndim(k) else float(k)
    return k * k / (2.0 * mass) + (mass if include_rest else 0.0)


def effective_wavenumber(k, dz: float):
    """k_eff with k_eff^2 = 2 (1 - cos k dz) / dz^2, the symbol of the 3-point Laplacian."""
    return 2.0 * np.sin(0.5 * np.asarray(k, dtype=float) * dz) / dz


def crank_nicolson_frequency(energy, dt: float):
    """Phase advance per unit time of an eigenstate of energy E under CN."""
    return 2.0 * np.arctan(0.5 * np.asarray(energy, dtype=float) * dt) / dt


def fit_angular_frequency(times, values) -> float:
    """omega such that values ~ exp(-i omega t), by linear regression of the unwrapped phase."""
    times = np.asarray(times, dtype=float)
    theta = np.unwrap(np.angle(np.asarray(values)))
    tc = times - times.mean()
    return float(-np.dot(tc, theta - theta.mean()) / np.dot(tc, tc))


@dataclass(frozen=True)
class DispersionMeasurement:
    k: float
    k_eff: float
    dt: float
    omega_measured: float
    omega_discrete: float
    omega_continuum: float

    @property
    def error_discrete(self) -> float:
        return abs(self.omega_measured - self.omega_discrete) / self.omega_discrete

    @property
    def error_continuum(self) -> float:
        return abs(self.omega_measured - self.omega_continuum) / self.omega_continuum


def measure_dispersion(mode: int, n_points: int = 1024, dz: float = 0.1, dt: float = 1e-3,
                       n_steps: int = 1000, mass: float = 1.0, include_rest: bool = True,
                       probe: int = 0) -> DispersionMeasurement:
    """Evolve the periodic plane wave exp(i k z), k = 2 pi mode / (n dz), and fit its frequency."""
    grid = Grid1D(0.0, dz * (n_points - 1), n_points)
    k = 2.0 * math.pi * mode / (n_points * dz)
    h = Hamiltonian1D(grid, mass=mass, include_rest_energy=include_rest, boundary=Boundary.PERIODIC)
    psi0 = Wavefunction(grid, np.exp(1j * k * grid.z))
    traj = evolve(h, psi0, EvolutionConfig(dt, n_steps))
    omega = fit_angular_frequency(traj.times, traj.states[:, probe])
    k_eff = float(effective_wavenumber(k, dz))
    return DispersionMeasurement(
        k=k,
        k_eff=k_eff,
        dt=dt,
        omega_measured=omega,
        omega_discrete=float(dispersion_relation(k_eff, mass, include_rest)),
        omega_continuum=float(dispersion_relation(k, mass, include_rest)),
    )
