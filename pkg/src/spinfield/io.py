"""CSV and JSON import/export.

CSV numbers are written with 17 significant digits so every float64 round
trips exactly. JSON is written with sorted keys and no timestamps so repeated
runs are byte-identical.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import UsageError
from .grid import Grid1D
from .phasor import Helicity, SpinField, Wavefunction

FIELD_COLUMNS = ("z", "fx", "fy")
WAVEFUNCTION_COLUMNS = ("z", "re", "im")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path, header, columns) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [np.asarray(c, dtype=float) for c in columns]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([fmt(v) for v in row])
    return path


def read_csv(path, expected=None) -> dict[str, np.ndarray]:
    """Read a numeric CSV with a header row; raises UsageError on anything malformed."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise UsageError(f"{path} has no data rows")
    header = [h.strip() for h in rows[0]]
    if expected is not None and tuple(header) != tuple(expected):
        raise UsageError(f"{path}: expected columns {list(expected)}, got {header}")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise UsageError(f"{path}: non-numeric entry ({exc})") from exc
    if data.ndim != 2 or data.shape[1] != len(header):
        raise UsageError(f"{path}: ragged rows")
    if not np.all(np.isfinite(data)):
        raise UsageError(f"{path}: non-finite values")
    return {name: data[:, i] for i, name in enumerate(header)}


def write_field_csv(path, field: SpinField) -> Path:
    return write_csv(path, FIELD_COLUMNS, (field.grid.z, field.fx, field.fy))


def read_field_csv(path, helicity=Helicity.PLUS) -> SpinField:
    cols = read_csv(path, FIELD_COLUMNS)
    grid = Grid1D.from_coordinates(cols["z"])
    return SpinField(grid, cols["fx"], cols["fy"], helicity)


def write_wavefunction_csv(path, psi: Wavefunction) -> Path:
    return write_csv(path, WAVEFUNCTION_COLUMNS, (psi.grid.z, psi.values.real, psi.values.imag))


def read_wavefunction_csv(path) -> Wavefunction:
    cols = read_csv(path, WAVEFUNCTION_COLUMNS)
    grid = Grid1D.from_coordinates(cols["z"])
    values = np.empty(grid.n_points, dtype=complex)
    values.real = cols["re"]
    values.imag = cols["im"]
    return Wavefunction(grid, values)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if not math.isfinite(value):
            return str(value)
        return value
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Path):
        return obj.as_posix()
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def export_trajectory(traj, directory, measured_omega=None, prefix="snapshot") -> Path:
    """One CSV per saved state plus ``manifest.json``; returns the manifest path."""
    directory = Path(directory)
    width = len(str(len(traj) - 1))
    files = []
    for i in range(len(traj)):
        name = f"{prefix}_{i:0{width}d}.csv"
        write_wavefunction_csv(directory / name, traj.wavefunction(i))
        files.append(name)
    manifest = {
        "dt": traj.dt,
        "steps": len(traj.norms) - 1,
        "times": traj.times,
        "norms": traj.norms,
        "measured_omega": measured_omega,
        "interaction_picture": traj.interaction_picture,
        "rest_energy": traj.rest_energy,
        "snapshots": files,
    }
    return write_json(directory / "manifest.json", manifest)


def export_eigen(result, directory, prefix="state") -> Path:
    directory = Path(directory)
    files = []
    for i in range(len(result.energies)):
        name = f"{prefix}_{i + 1}.csv"
        write_wavefunction_csv(directory / name, result.wavefunction(i))
        files.append(name)
    payload = {
        "energies": result.energies,
        "residuals": result.residuals,
        "rest_energy": result.rest_energy,
        "grid": {"z_min": result.grid.z_min, "z_max": result.grid.z_max,
                 "n_points": result.grid.n_points, "spacing": result.grid.spacing},
        "states": files,
    }
    return write_json(directory / "eigen.json", payload)
