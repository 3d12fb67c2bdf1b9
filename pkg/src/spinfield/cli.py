"""Command-line experiments.

Each command resolves its parameters (defaults, then an optional JSON config
file, then explicit flags), runs, and writes CSV/JSON artifacts plus a
``manifest.json`` into ``<output-dir>/<command>/``. Exit status: 0 on success,
1 when a numerical invariant is violated or a solver fails (a diagnostic
``error.json`` is written), 2 on invalid usage.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .boundstates import BoxSpec, analytic_energy, analytic_state, discrete_energy, numeric_eigensolve
from .boundstates import stationarity_check
from .dynamics import (
    Boundary,
    EvolutionConfig,
    Hamiltonian1D,
    evolve,
    evolve_real_pair,
    fit_angular_frequency,
    measure_dispersion,
)
from .errors import DomainError, SpinFieldError, UsageError
from .grid import Grid1D
from .io import dumps, export_eigen, export_trajectory, write_csv, write_field_csv, write_json
from .phasor import Helicity, Wavefunction, from_wavefunction, phase_slope
from .plotting import PLOT_KINDS, plot
from .relativity import Boost, Event, boost_momentum, boosted_field, de_broglie_wavelength
from .relativity import invariant_phase_check
from .units import CODATA2018, UnitSystem, compton_radius, convert, momentum_transfer_scale
from .units import rotation_frequency
from .vortex import VortexArray, magnetic_moment, total_spin, vortex_angular_momentum

ENV_OUTPUT_DIR = "SPINFIELD_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "spinfield_output"

EQUIVALENCE_TOL = 1e-10
NORM_DRIFT_TOL = 1e-9
PHASE_TOL = 1e-10


class InvariantViolation(SpinFieldError):
    def __init__(self, message, diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _int_list(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def _bool(value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _boundary(value):
    text = str(value).strip().lower()
    for b in Boundary:
        if b.value.lower() == text:
            return b.value
    raise ValueError(f"unknown boundary {value!r}")


def _helicity(value):
    return Helicity.parse(value).name.lower()


# name -> (parser, default, help)
PARAMETERS = {
    "observables": {
        "n_vortices": (int, 1, "number of parallel vortices N"),
        "weights": (_float_list, None, "comma-separated mass fractions summing to 1"),
        "mass_kg": (float, CODATA2018.electron_mass, "particle mass"),
        "charge_C": (float, CODATA2018.elementary_charge, "particle charge"),
    },
    "predict": {
        "mass_kg": (float, CODATA2018.electron_mass, "particle mass"),
    },
    "boost": {
        "beta": (float, 0.6, "velocity v/c of the particle in the boosted frame"),
        "samples": (int, 1000, "random events for the phase-invariance check"),
        "extent": (float, 10.0, "events are drawn from [-extent, extent]^2 (natural units)"),
        "n_points": (int, 2049, "grid points for the boosted field"),
        "wavelengths": (float, 2.0, "domain length in de Broglie wavelengths"),
    },
    "dispersion": {
        "n_points": (int, 1024, "periodic grid points"),
        "dz": (float, 0.1, "grid spacing (natural length units)"),
        "modes": (_int_list, [1, 2, 4, 8, 16], "plane-wave mode numbers"),
        "dt": (float, 1e-3, "time step"),
        "steps": (int, 1000, "time steps"),
        "rest_energy": (_bool, True, "include the rest-energy term"),
    },
    "evolve": {
        "n_points": (int, 512, "grid points"),
        "length": (float, 40.0, "domain length"),
        "boundary": (_boundary, "Periodic", "Dirichlet or Periodic"),
        "k0": (float, 1.0, "packet wavenumber"),
        "sigma": (float, 2.0, "packet width"),
        "potential": (str, "none", "none or harmonic"),
        "potential_strength": (float, 0.0, "harmonic spring constant"),
        "dt": (float, 0.01, "time step"),
        "steps": (int, 1000, "time steps"),
        "save_every": (int, 100, "snapshot interval in steps"),
        "interaction_picture": (_bool, False, "factor exp(-i m t) out of the state"),
        "rest_energy": (_bool, True, "include the rest-energy term"),
    },
    "box": {
        "length": (float, 10.0, "box length (natural units)"),
        "n_points": (int, 201, "grid points including the walls"),
        "n_states": (int, 3, "number of eigenstates"),
        "helicity": (_helicity, "plus", "plus or minus"),
        "t": (float, 0.0, "time at which analytic fields are sampled"),
        "check_steps": (int, 0, "if > 0, evolve the ground state over one rest period in this many steps"),
    },
    "equivalence": {
        "n_points": (int, 128, "grid points"),
        "length": (float, 20.0, "domain length"),
        "boundary": (_boundary, "Periodic", "Dirichlet or Periodic"),
        "dt": (float, 0.05, "time step"),
        "steps": (int, 1000, "time steps"),
        "n_states": (int, 10, "random initial states"),
        "rest_energy": (_bool, True, "include the rest-energy term"),
    },
    "plot": {
        "csv": (str, None, "input CSV produced by another command"),
        "kind": (str, "profile", f"one of {', '.join(PLOT_KINDS)}"),
        "output": (str, None, "output SVG path (default: <csv stem>_<kind>.svg next to the CSV)"),
    },
}

CONFIG_KEYS = {"command", "parameters", "seed", "output_dir", "jobs"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinfield", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, params in PARAMETERS.items():
        p = sub.add_parser(name, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--output-dir", dest="output_dir")
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int)
        for key, (_, default, help_text) in params.items():
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=key, metavar=key.split("_")[-1].upper(),
                           help=f"{help_text} (default: {default})")
    return parser


def resolve(args: argparse.Namespace, environ=os.environ) -> dict:
    """Merge defaults, config file and flags into one validated run config."""
    command = args.command
    given = vars(args).copy()
    given.pop("command")
    config = {}
    if "config" in given:
        path = Path(given.pop("config"))
        try:
            config = json.loads(path.read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot load config {path}: {exc}") from exc
        if not isinstance(config, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(config) - CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
        if config.get("command", command) != command:
            raise UsageError(f"config is for command {config['command']!r}, not {command!r}")
    spec = PARAMETERS[command]
    file_params = config.get("parameters", {}) or {}
    if not isinstance(file_params, dict):
        raise UsageError("'parameters' must be an object")
    unknown = set(file_params) - set(spec)
    if unknown:
        raise UsageError(f"unknown parameters for {command}: {sorted(unknown)}")
    params = {}
    for key, (parse, default, _) in spec.items():
        raw = given.get(key, file_params.get(key, default))
        try:
            params[key] = raw if raw is None else parse(raw)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid value for {key}: {raw!r} ({exc})") from exc
    seed = given.get("seed", config.get("seed", 0))
    jobs = given.get("jobs", config.get("jobs", 1))
    if "output_dir" in given:
        base = given["output_dir"]
    elif environ.get(ENV_OUTPUT_DIR):
        base = environ[ENV_OUTPUT_DIR]
    else:
        base = config.get("output_dir", DEFAULT_OUTPUT_DIR)
    try:
        seed, jobs = int(seed), int(jobs)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"seed and jobs must be integers ({exc})") from exc
    if jobs < 1:
        raise UsageError("jobs must be >= 1")
    return {
        "command": command,
        "parameters": params,
        "seed": seed,
        "jobs": jobs,
        "output_dir": Path(base) / command,
    }


def _require(cond, message):
    if not cond:
        raise UsageError(message)


def _positive(params, *keys):
    for key in keys:
        _require(params[key] > 0, f"{key} must be positive, got {params[key]!r}")


# -- commands ----------------------------------------------------------------


def cmd_observables(p, rc, out):
    _positive(p, "n_vortices", "mass_kg")
    arr = VortexArray.canonical_array(p["n_vortices"], p["mass_kg"], p["charge_C"],
                                      weights=p["weights"])
    hbar = CODATA2018.hbar
    spin = total_spin(arr)
    mu = magnetic_moment(arr)
    magneton = p["charge_C"] * hbar / (2.0 * p["mass_kg"])
    per_vortex = [vortex_angular_momentum(arr, i) / hbar for i in range(arr.n_vortices)]
    results = {
        "n_vortices": arr.n_vortices,
        "total_spin_J_s": spin,
        "total_spin_hbar": spin / hbar,
        "magnetic_moment_J_per_T": mu,
        "mu_over_muB": mu / CODATA2018.bohr_magneton,
        "mu_over_particle_magneton": mu / magneton,
        "vortex_radius_m": arr.radius,
        "omega_rad_s": arr.omega,
        "equatorial_speed_over_c": arr.equatorial_speed / CODATA2018.c,
        "per_vortex_angular_momentum_hbar_min": min(per_vortex),
        "per_vortex_angular_momentum_hbar_max": max(per_vortex),
        "charge_partition": arr.charge_partition,
    }
    write_csv(out / "per_vortex.csv", ("index", "angular_momentum_hbar"),
              (np.arange(arr.n_vortices), per_vortex))
    checks = {
        "total_spin_is_half_hbar": (abs(spin / (0.5 * hbar) - 1.0), 1e-12),
        "moment_is_magneton": (abs(mu / magneton - 1.0), 1e-12),
    }
    return results, checks, ["per_vortex.csv"]


def cmd_predict(p, rc, out):
    _positive(p, "mass_kg")
    m = p["mass_kg"]
    r = compton_radius(m)
    rot = rotation_frequency(m)
    mom = momentum_transfer_scale(m)
    results = {
        "compton_radius_m": r,
        "compton_radius_pm": r * 1e12,
        "rotation_rad_s": rot.angular,
        "rotation_Hz": rot.cyclic,
        "momentum_kg_m_s": mom.si,
        "momentum_MeVc": mom.mev_per_c,
        "rest_energy_J": convert(1.0, "energy", UnitSystem.natural(m), UnitSystem.si()),
    }
    checks = {
        "radius_times_omega_is_c": (abs(r * rot.angular / CODATA2018.c - 1.0), 1e-14),
        "momentum_is_pi_hbar_over_radius": (abs(mom.si * r / (math.pi * CODATA2018.hbar) - 1.0), 1e-14),
    }
    return results, checks, []


def cmd_boost(p, rc, out):
    try:
        boost = Boost(p["beta"])
    except SpinFieldError as exc:
        raise UsageError(str(exc)) from exc
    _positive(p, "samples", "extent", "wavelengths")
    _require(p["n_points"] >= 3, "n_points must be >= 3")
    rng = np.random.default_rng(rc["seed"])
    events = rng.uniform(-p["extent"], p["extent"], size=(p["samples"], 2))
    diffs = [abs(invariant_phase_check(1.0, boost, Event(t, z)).difference) for t, z in events]
    four = boost_momentum(1.0, boost)
    nat, si = UnitSystem.natural(), UnitSystem.si()
    results = {
        "beta": boost.beta,
        "gamma": boost.gamma,
        "energy_natural": four.energy,
        "momentum_natural": four.momentum,
        "energy_J": convert(four.energy, "energy", nat, si),
        "momentum_kg_m_s": convert(four.momentum, "momentum", nat, si),
        "max_phase_difference": max(diffs),
    }
    files = []
    checks = {"phase_invariance": (max(diffs), PHASE_TOL)}
    if four.momentum != 0:
        lam = de_broglie_wavelength(four)
        grid = Grid1D(0.0, p["wavelengths"] * lam, p["n_points"])
        field = boosted_field(1.0, boost, grid)
        lam_fit = 2.0 * math.pi / abs(phase_slope(field))
        write_field_csv(out / "boosted_field.csv", field)
        files.append("boosted_field.csv")
        results.update({
            "de_broglie_wavelength_natural": lam,
            "de_broglie_wavelength_m": convert(lam, "length", nat, si),
            "wavelength_from_phase_slope_natural": lam_fit,
        })
        checks["wavelength_consistency"] = (abs(lam_fit / lam - 1.0), 1e-10)
    return results, checks, files


def _measure(p, mode):
    return measure_dispersion(mode, n_points=p["n_points"], dz=p["dz"], dt=p["dt"],
                              n_steps=p["steps"], include_rest=p["rest_energy"])


def cmd_dispersion(p, rc, out):
    _positive(p, "dz", "dt", "steps")
    _require(p["n_points"] >= 3, "n_points must be >= 3")
    _require(all(0 <= m < p["n_points"] // 2 for m in p["modes"]), "modes must lie in [0, n_points/2)")
    with ThreadPoolExecutor(max_workers=rc["jobs"]) as pool:
        rows = list(pool.map(lambda m: _measure(p, m), p["modes"]))
    cols = ("k", "k_eff", "omega_measured", "omega_discrete", "omega_continuum",
            "error_discrete", "error_continuum")
    write_csv(out / "dispersion.csv", cols, [[getattr(r, c) for r in rows] for c in cols])
    results = {
        "points": [{c: getattr(r, c) for c in cols} for r in rows],
        "max_error_discrete": max(r.error_discrete for r in rows),
        "max_error_continuum": max(r.error_continuum for r in rows),
        "max_k_dz": max(r.k for r in rows) * p["dz"],
    }
    return results, {}, ["dispersion.csv"]


def _packet(grid, k0, sigma, center):
    z = grid.z
    return np.exp(-0.5 * ((z - center) / sigma) ** 2) * np.exp(1j * k0 * z)


def cmd_evolve(p, rc, out):
    _positive(p, "length", "sigma", "dt", "steps", "save_every")
    _require(p["n_points"] >= 3, "n_points must be >= 3")
    _require(p["potential"] in ("none", "harmonic"), "potential must be none or harmonic")
    grid = Grid1D(0.0, p["length"], p["n_points"])
    pot = None
    if p["potential"] == "harmonic":
        pot = 0.5 * p["potential_strength"] * (grid.z - 0.5 * p["length"]) ** 2
    h = Hamiltonian1D(grid, pot, 1.0, p["rest_energy"], Boundary(p["boundary"]))
    values = _packet(grid, p["k0"], p["sigma"], 0.5 * p["length"])
    if h.boundary is Boundary.DIRICHLET:
        values[0] = values[-1] = 0.0
    psi0 = Wavefunction(grid, values / h.norm(values))
    cfg = EvolutionConfig(p["dt"], p["steps"], interaction_picture=p["interaction_picture"],
                          save_every=p["save_every"])
    traj = evolve(h, psi0, cfg)
    weights = np.full(grid.n_points, grid.spacing)
    if h.boundary is Boundary.DIRICHLET:
        weights[0] = weights[-1] = 0.5 * grid.spacing
    overlap = traj.lab_frame() @ (np.conj(psi0.values) * weights)
    omega = fit_angular_frequency(traj.times, overlap) if len(traj) > 2 else None
    traj_manifest = export_trajectory(traj, out / "trajectory", measured_omega=omega)
    drift = float(np.max(np.abs(traj.norms / traj.norms[0] - 1.0)))
    results = {
        "norm_drift": drift,
        "initial_energy": h.expectation(psi0.values),
        "final_energy": h.expectation(traj.lab_frame()[-1]),
        "measured_omega": omega,
        "snapshots": len(traj),
    }
    snapshots = json.loads(traj_manifest.read_text())["snapshots"]
    files = ["trajectory/manifest.json"] + [f"trajectory/{name}" for name in snapshots]
    return results, {"norm_drift": (drift, NORM_DRIFT_TOL)}, files


def cmd_box(p, rc, out):
    _positive(p, "length", "n_states")
    _require(p["n_points"] >= 3, "n_points must be >= 3")
    _require(p["n_states"] <= p["n_points"] - 2, "n_states must be <= n_points - 2")
    spec = BoxSpec(p["length"], 1, Helicity.parse(p["helicity"]))
    grid = spec.grid(p["n_points"])
    eig = numeric_eigensolve(spec.hamiltonian(grid, include_rest=True), p["n_states"])
    export_eigen(eig, out)
    files = ["eigen.json"] + [f"state_{i + 1}.csv" for i in range(p["n_states"])]
    levels = []
    for n in range(1, p["n_states"] + 1):
        s = BoxSpec(p["length"], n, spec.helicity)
        state = analytic_state(s, p["t"], grid)
        name = f"analytic_field_{n}.csv"
        write_field_csv(out / name, state.field)
        files.append(name)
        levels.append({
            "n": n,
            "analytic": analytic_energy(s),
            "discrete": discrete_energy(s, grid),
            "numeric": float(eig.energies[n - 1]),
        })
    ortho = float(np.max(np.abs(eig.overlaps() - np.eye(p["n_states"]))))
    results = {
        "levels": levels,
        "orthonormality_error": ortho,
        "max_residual": float(eig.residuals.max()),
        "node_counts": eig.node_counts(),
    }
    checks = {"orthonormality": (ortho, 1e-10), "residual": (float(eig.residuals.max()), 1e-8)}
    if p["check_steps"] > 0:
        cfg = EvolutionConfig(2.0 * math.pi / p["check_steps"], p["check_steps"])
        rep = stationarity_check(spec, grid, cfg)
        results["stationarity"] = {
            "modulus_drift": rep.modulus_drift,
            "omega_fitted": rep.omega_fitted,
            "omega_expected": rep.omega_expected,
            "relative_error": rep.relative_error,
        }
        checks["modulus_drift"] = (rep.modulus_drift, 1e-8)
    return results, checks, files


def _random_state(rng, grid, boundary):
    values = rng.standard_normal(grid.n_points) + 1j * rng.standard_normal(grid.n_points)
    if boundary is Boundary.DIRICHLET:
        values[0] = values[-1] = 0.0
    return values


def equivalence_deviation(h: Hamiltonian1D, psi0: Wavefunction, cfg: EvolutionConfig) -> float:
    """Max pointwise gap between the complex evolution and the mapped real-pair evolution."""
    a = evolve(h, psi0, cfg)
    b = evolve_real_pair(h, from_wavefunction(psi0), cfg)
    return float(np.max(np.abs(a.states - (b.fx + 1j * b.fy))))


def cmd_equivalence(p, rc, out):
    _positive(p, "length", "dt", "steps", "n_states")
    _require(p["n_points"] >= 3, "n_points must be >= 3")
    grid = Grid1D(0.0, p["length"], p["n_points"])
    h = Hamiltonian1D(grid, None, 1.0, p["rest_energy"], Boundary(p["boundary"]))
    rng = np.random.default_rng(rc["seed"])
    states = []
    for _ in range(p["n_states"]):
        values = _random_state(rng, grid, h.boundary)
        states.append(Wavefunction(grid, values / h.norm(values)))
    cfg = EvolutionConfig(p["dt"], p["steps"], save_every=p["steps"])
    with ThreadPoolExecutor(max_workers=rc["jobs"]) as pool:
        devs = list(pool.map(lambda s: equivalence_deviation(h, s, cfg), states))
    results = {"deviations": devs, "max_deviation": max(devs)}
    return results, {"max_deviation": (max(devs), EQUIVALENCE_TOL)}, []


COMMANDS = {
    "observables": cmd_observables,
    "predict": cmd_predict,
    "boost": cmd_boost,
    "dispersion": cmd_dispersion,
    "evolve": cmd_evolve,
    "box": cmd_box,
    "equivalence": cmd_equivalence,
}


def run(rc: dict) -> int:
    """Execute a resolved run config; returns the process exit status."""
    out = Path(rc["output_dir"])
    command = rc["command"]
    if command == "plot":
        return _run_plot(rc)
    try:
        results, checks, files = COMMANDS[command](rc["parameters"], rc, out)
    except DomainError as exc:
        # only user-supplied parameters can leave a formula's domain here
        raise UsageError(str(exc)) from exc
    violations = {k: v for k, (v, tol) in checks.items() if not v <= tol}
    manifest = {
        "command": command,
        "parameters": rc["parameters"],
        "seed": rc["seed"],
        "jobs": rc["jobs"],
        "constants": CODATA2018.as_dict(),
        "results": results,
        "checks": {
            "values": {k: {"value": v, "tolerance": tol} for k, (v, tol) in checks.items()},
            "passed": not violations,
        },
        "files": files,
        "version": __version__,
    }
    write_json(out / "manifest.json", manifest)
    sys.stdout.write(dumps(results))
    if violations:
        raise InvariantViolation(f"{command}: invariant check failed", {"violations": violations})
    return 0


def _run_plot(rc):
    p = rc["parameters"]
    _require(p["csv"] is not None, "plot needs --csv")
    csv_path = Path(p["csv"])
    output = Path(p["output"]) if p["output"] else csv_path.with_name(f"{csv_path.stem}_{p['kind']}.svg")
    plot(csv_path, p["kind"], output)
    sys.stdout.write(f"{output}\n")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rc = resolve(args)
        return run(rc)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except SpinFieldError as exc:
        diag = {"error": type(exc).__name__, "message": str(exc),
                "diagnostics": getattr(exc, "diagnostics", {})}
        out = Path(rc["output_dir"]) if "rc" in locals() else Path(DEFAULT_OUTPUT_DIR)
        write_json(out / "error.json", diag)
        sys.stderr.write(dumps(diag))
        return 1


if __name__ == "__main__":
    sys.exit(main())
