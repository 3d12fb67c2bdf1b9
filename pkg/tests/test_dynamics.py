import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from spinfield.dynamics import (
    Boundary,
    EvolutionConfig,
    Hamiltonian1D,
    apply_hamiltonian,
    crank_nicolson_frequency,
    dispersion_relation,
    effective_wavenumber,
    evolve,
    evolve_real_pair,
    fit_angular_frequency,
    measure_dispersion,
)
from spinfield.errors import DomainError, InstabilityError, UsageError
from spinfield.grid import Grid1D
from spinfield.phasor import Helicity, SpinField, Wavefunction, from_wavefunction, helicity_flip, to_wavefunction

BOUNDARIES = list(Boundary)


def dense_h(h):
    n = h.grid.n_points
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        cols.append(h.apply(e))
    return np.array(cols).T


def random_state(rng, grid, boundary):
    v = rng.standard_normal(grid.n_points) + 1j * rng.standard_normal(grid.n_points)
    if boundary is Boundary.DIRICHLET:
        v[0] = v[-1] = 0.0
    psi = Wavefunction(grid, v)
    return Wavefunction(grid, v / psi.norm() if boundary is Boundary.DIRICHLET
                        else v / math.sqrt(grid.spacing * np.sum(np.abs(v) ** 2)))


@pytest.mark.parametrize("boundary", BOUNDARIES)
def test_hamiltonian_is_symmetric(boundary, rng):
    g = Grid1D(0.0, 2.0, 24)
    h = Hamiltonian1D(g, rng.standard_normal(24), mass=1.7, boundary=boundary)
    a = dense_h(h)
    if boundary is Boundary.DIRICHLET:
        a = a[1:-1, 1:-1]
    assert np.array_equal(a, a.T)


def test_matches_dense_laplacian_oracle(rng):
    g = Grid1D(0.0, 3.0, 30)
    v = rng.standard_normal(30)
    for boundary, periodic in [(Boundary.PERIODIC, True), (Boundary.DIRICHLET, False)]:
        h = Hamiltonian1D(g, v, mass=2.0, include_rest_energy=True, boundary=boundary)
        ref = -oracles.dense_laplacian(30, g.spacing, periodic) / (2 * 2.0) + np.diag(v + 2.0)
        a = dense_h(h)
        sl = slice(None) if periodic else slice(1, -1)
        assert np.allclose(a[sl, sl], ref[sl, sl], rtol=1e-13, atol=1e-10)


def test_constant_state_in_periodic_box():
    g = Grid1D(0.0, 1.0, 16)
    h = Hamiltonian1D(g, include_rest_energy=False, boundary=Boundary.PERIODIC)
    out = apply_hamiltonian(h, Wavefunction(g, np.full(16, 0.3 + 0.1j)))
    assert np.max(np.abs(out.values)) < 1e-12


@pytest.mark.parametrize("mode", [1, 3, 10])
def test_plane_wave_discrete_symbol(mode):
    n, dz = 128, 0.05
    g = Grid1D(0.0, dz * (n - 1), n)
    k = 2 * math.pi * mode / (n * dz)
    h = Hamiltonian1D(g, boundary=Boundary.PERIODIC)
    psi = np.exp(1j * k * g.z)
    expected = dispersion_relation(effective_wavenumber(k, dz))
    assert np.allclose(h.apply(psi), expected * psi, rtol=0, atol=1e-9 * expected)
    # continuum limit
    assert effective_wavenumber(k, 1e-6) == pytest.approx(k, rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_sine_is_exact_dirichlet_eigenvector(n):
    # coarse grid: the roundoff floor of the residual grows like |H| eps / E
    g = Grid1D(0.0, 1.0, 65)
    h = Hamiltonian1D(g, include_rest_energy=False)
    psi = np.sin(n * math.pi * g.z)
    psi[-1] = 0.0
    e_kin = (1 - math.cos(n * math.pi * g.spacing)) / g.spacing**2
    r = h.apply(psi) - e_kin * psi
    assert h.norm(r) / (e_kin * h.norm(psi)) < 1e-12


def test_grid_mismatch():
    h = Hamiltonian1D(Grid1D(0.0, 1.0, 10))
    with pytest.raises(UsageError):
        apply_hamiltonian(h, Wavefunction(Grid1D(0.0, 1.0, 11), np.zeros(11)))


def test_hamiltonian_validation():
    g = Grid1D(0.0, 1.0, 10)
    with pytest.raises(DomainError):
        Hamiltonian1D(g, np.full(10, np.inf))
    with pytest.raises(UsageError):
        Hamiltonian1D(g, np.zeros(9))
    with pytest.raises(DomainError):
        Hamiltonian1D(g, mass=0.0)
    with pytest.raises(DomainError):
        EvolutionConfig(dt=0.0, n_steps=3)
    with pytest.raises(UsageError):
        EvolutionConfig(dt=0.1, n_steps=3, scheme="SplitStep")


def test_dirichlet_rejects_nonzero_walls():
    g = Grid1D(0.0, 1.0, 10)
    with pytest.raises(UsageError):
        evolve(Hamiltonian1D(g), Wavefunction(g, np.ones(10)), EvolutionConfig(0.1, 2))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_instability_is_reported():
    g = Grid1D(0.0, 1.0, 10)
    h = Hamiltonian1D(g, np.full(10, 1e305), boundary=Boundary.PERIODIC)
    with pytest.raises(InstabilityError):
        evolve(h, Wavefunction(g, np.full(10, 1e10)), EvolutionConfig(1e3, 2))


def test_eigenstate_evolves_by_phase_only():
    g = Grid1D(0.0, 1.0, 129)
    h = Hamiltonian1D(g)
    psi = np.sin(2 * math.pi * g.z) * math.sqrt(2)
    psi[-1] = 0.0
    e = 1.0 + (1 - math.cos(2 * math.pi * g.spacing)) / g.spacing**2
    cfg = EvolutionConfig(dt=1e-3, n_steps=500, save_every=500)
    final = evolve(h, Wavefunction(g, psi), cfg).final.values
    t = cfg.dt * cfg.n_steps
    exact = np.exp(-1j * e * t) * psi
    assert oracles.max_phase_aligned_deviation(final, exact) < 1e-8
    # the scheme's own phase rate is the Cayley-transform frequency
    assert np.max(np.abs(final - np.exp(-1j * crank_nicolson_frequency(e, cfg.dt) * t) * psi)) < 1e-9


@pytest.mark.parametrize("boundary", BOUNDARIES)
def test_norm_conserved(boundary, rng):
    g = Grid1D(0.0, 5.0, 96)
    h = Hamiltonian1D(g, boundary=boundary)
    traj = evolve(h, random_state(rng, g, boundary), EvolutionConfig(0.05, 10_000, save_every=10_000))
    assert np.max(np.abs(traj.norms / traj.norms[0] - 1)) < 1e-10


@pytest.mark.parametrize("boundary", BOUNDARIES)
def test_energy_conserved(boundary, rng):
    g = Grid1D(0.0, 5.0, 64)
    v = 0.5 * (g.z - 2.5) ** 2
    h = Hamiltonian1D(g, v, boundary=boundary)
    psi0 = random_state(rng, g, boundary)
    traj = evolve(h, psi0, EvolutionConfig(0.02, 2000, save_every=500))
    energies = [h.expectation(s) for s in traj.states]
    assert np.allclose(energies, energies[0], rtol=1e-10)


def test_interaction_picture_is_a_global_phase():
    # smooth, slow packet: CN with and without the constant shift differ at O(E m (E + m) dt^3)
    g = Grid1D(0.0, 40.0, 401)
    h = Hamiltonian1D(g, boundary=Boundary.PERIODIC)
    psi0 = Wavefunction(g, np.exp(-(((g.z - 20.0) / 6.0) ** 2)) * np.exp(2j * math.pi * g.z / 40))
    cfg = dict(dt=1e-4, n_steps=1000, save_every=250)
    lab = evolve(h, psi0, EvolutionConfig(**cfg))
    ip = evolve(h, psi0, EvolutionConfig(**cfg, interaction_picture=True))
    assert np.max(np.abs(np.abs(lab.states) - np.abs(ip.states))) < 1e-10
    # the rest term contributes the CN phase of a constant shift
    assert np.max(np.abs(lab.states - ip.lab_frame())) < 1e-9


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1), st.sampled_from(BOUNDARIES), st.booleans())
def test_dual_evolvers_agree(seed, boundary, interaction):
    rng = np.random.default_rng(seed)
    g = Grid1D(0.0, 4.0, 64)
    h = Hamiltonian1D(g, 0.3 * np.cos(g.z), boundary=boundary)
    psi0 = random_state(rng, g, boundary)
    cfg = EvolutionConfig(0.01, 1000, interaction_picture=interaction, save_every=250)
    a = evolve(h, psi0, cfg)
    b = evolve_real_pair(h, from_wavefunction(psi0), cfg)
    mapped = b.fx + 1j * b.fy
    assert np.max(np.abs(a.states - mapped)) < 1e-10
    assert np.allclose(a.times, b.times)


@pytest.mark.parametrize("boundary", BOUNDARIES)
def test_helicity_flip_commutes_with_evolution(boundary, rng):
    g = Grid1D(0.0, 4.0, 50)
    h = Hamiltonian1D(g, 0.2 * g.z, boundary=boundary)
    f = from_wavefunction(random_state(rng, g, boundary))
    cfg = EvolutionConfig(0.03, 300, save_every=100)
    a = evolve_real_pair(h, f, cfg)
    b = evolve_real_pair(h, helicity_flip(f), cfg)
    assert np.array_equal(a.fx, b.fx)
    assert np.array_equal(a.fy, -b.fy)
    assert b.helicity is Helicity.MINUS


def test_minus_field_maps_to_conjugate_wavefunction(rng):
    g = Grid1D(0.0, 4.0, 40)
    h = Hamiltonian1D(g, boundary=Boundary.PERIODIC)
    psi0 = random_state(rng, g, Boundary.PERIODIC)
    cfg = EvolutionConfig(0.02, 200, save_every=200)
    a = evolve(h, psi0, cfg).final.values
    b = evolve_real_pair(h, helicity_flip(from_wavefunction(psi0)), cfg).at(-1)
    assert np.max(np.abs(np.conj(a) - to_wavefunction(b).values)) < 1e-12


def test_uniform_field_rotates_at_rest_frequency():
    g = Grid1D(0.0, 1.0, 32)
    h = Hamiltonian1D(g, boundary=Boundary.PERIODIC)
    f0 = SpinField(g, np.ones(32), np.zeros(32))
    dt = 0.01
    traj = evolve_real_pair(h, f0, EvolutionConfig(dt, 1000))
    # rigid: every point carries the same phasor
    assert np.max(np.ptp(traj.fx, axis=1)) < 1e-12
    assert np.max(np.abs(np.hypot(traj.fx, traj.fy) - 1)) < 1e-12
    omega = fit_angular_frequency(traj.times, traj.fx[:, 0] + 1j * traj.fy[:, 0])
    assert omega == pytest.approx(float(crank_nicolson_frequency(1.0, dt)), rel=1e-12)
    assert omega == pytest.approx(1.0, rel=dt**2 / 12 * 1.01)


def test_dispersion_formula():
    assert dispersion_relation(0.0) == 1.0
    assert dispersion_relation(0.1) == pytest.approx(1.005, rel=1e-15)
    assert dispersion_relation(0.1, include_rest=False) == pytest.approx(0.005, rel=1e-14)


@pytest.mark.parametrize("mode", [4, 16])
def test_measured_dispersion(mode):
    m = measure_dispersion(mode, n_points=1024, dz=0.1, dt=1e-3, n_steps=1000)
    assert m.k * 0.1 <= 0.1
    assert m.error_discrete < 1e-6
    assert m.error_continuum < 1e-3


def test_discretization_error_is_second_order():
    k = 1.3
    errs = [k**2 - effective_wavenumber(k, dz) ** 2 for dz in (0.1, 0.05)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)


def test_time_step_error_is_second_order():
    e = [measure_dispersion(16, n_points=1024, dz=0.1, dt=dt, n_steps=500).error_discrete
         for dt in (4e-3, 2e-3)]
    assert e[0] / e[1] == pytest.approx(4.0, rel=0.2)


def test_fit_frequency_recovers_known_rate():
    t = np.linspace(0, 10, 500)
    assert fit_angular_frequency(t, np.exp(-2.5j * t)) == pytest.approx(2.5, rel=1e-13)


def test_save_every_keeps_last_state():
    g = Grid1D(0.0, 1.0, 8)
    h = Hamiltonian1D(g, boundary=Boundary.PERIODIC)
    traj = evolve(h, Wavefunction(g, np.ones(8)), EvolutionConfig(0.1, 7, save_every=3))
    assert traj.times.tolist() == pytest.approx([0.0, 0.3, 0.6, 0.7])
    assert len(traj.norms) == 8
