"""Static SVG plots of CSV artifacts.

Figures are rendered with matplotlib's object API (no pyplot state), a fixed
SVG hash salt and no date metadata, so identical input gives identical bytes.
"""

from __future__ import annotations

import io
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .errors import UsageError
from .io import read_csv

PLOT_KINDS = ("profile", "phasors", "dispersion")

_RC = {
    "svg.hashsalt": "spinfield",
    "svg.fonttype": "path",
    "path.simplify": False,
}


def _complex_columns(cols):
    if {"re", "im"} <= cols.keys():
        return cols["re"] + 1j * cols["im"]
    if {"fx", "fy"} <= cols.keys():
        return cols["fx"] + 1j * cols["fy"]
    raise UsageError("profile/phasor plots need columns (z, re, im) or (z, fx, fy)")


def _profile(fig, cols):
    if "z" not in cols:
        raise UsageError("profile plot needs a z column")
    z, psi = cols["z"], _complex_columns(cols)
    ax1, ax2 = fig.subplots(2, 1, sharex=True)
    ax1.plot(z, psi.real, lw=1.0, label="Re / $F_x$")
    ax1.plot(z, psi.imag, lw=1.0, label="Im / $F_y$")
    ax1.plot(z, np.abs(psi), "k", lw=1.5, label="modulus")
    ax1.axhline(0.0, color="0.6", lw=0.5)
    ax1.legend(loc="upper right", fontsize=7)
    ax1.set_ylabel("amplitude")
    phase = np.where(np.abs(psi) > 0, np.angle(psi), np.nan)
    ax2.plot(z, phase, ".", ms=2)
    ax2.set_ylim(-np.pi * 1.05, np.pi * 1.05)
    ax2.set_ylabel("phase [rad]")
    ax2.set_xlabel("z")


def _phasors(fig, cols, max_arrows=48):
    if "z" not in cols:
        raise UsageError("phasor plot needs a z column")
    z, psi = cols["z"], _complex_columns(cols)
    step = max(1, len(z) // max_arrows)
    z, psi = z[::step], psi[::step]
    scale = np.abs(psi).max() or 1.0
    ax = fig.subplots()
    ax.quiver(z, np.zeros_like(z), psi.real / scale, psi.imag / scale,
              angles="uv", scale_units="y", scale=2.2, width=0.004)
    ax.set_ylim(-0.6, 0.6)
    ax.set_yticks([])
    ax.set_xlabel("z")
    ax.set_title("phasor (F_x, F_y) along z", fontsize=9)


def _dispersion(fig, cols):
    need = {"k", "omega_measured", "omega_discrete", "omega_continuum"}
    if not need <= cols.keys():
        raise UsageError(f"dispersion plot needs columns {sorted(need)}")
    order = np.argsort(cols["k"])
    k = cols["k"][order]
    ax = fig.subplots()
    ax.plot(k, cols["omega_continuum"][order], "-", lw=1.0, label="continuum")
    ax.plot(k, cols["omega_discrete"][order], "--", lw=1.0, label="3-point lattice")
    ax.plot(k, cols["omega_measured"][order], "o", ms=4, mfc="none", label="measured")
    ax.set_xlabel("k")
    ax.set_ylabel("omega")
    ax.legend(fontsize=7)


def render(csv_path, kind: str) -> bytes:
    if kind not in PLOT_KINDS:
        raise UsageError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
    cols = read_csv(csv_path)
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(6.0, 4.0))
        {"profile": _profile, "phasors": _phasors, "dispersion": _dispersion}[kind](fig, cols)
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def plot(csv_path, kind: str, output) -> Path:
    """Render ``csv_path`` as an SVG; nothing is written if the CSV is unusable."""
    data = render(csv_path, kind)
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_bytes(data)
    return output
