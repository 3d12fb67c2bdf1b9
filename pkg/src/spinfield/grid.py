from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import UsageError


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1-D grid including both end points."""

    z_min: float
    z_max: float
    n_points: int

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise UsageError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if not (math.isfinite(self.z_min) and math.isfinite(self.z_max)):
            raise UsageError("grid bounds must be finite")
        if not self.z_max > self.z_min:
            raise UsageError(f"need z_max > z_min, got [{self.z_min}, {self.z_max}]")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def spacing(self) -> float:
        return (self.z_max - self.z_min) / (self.n_points - 1)

    @property
    def length(self) -> float:
        return self.z_max - self.z_min

    @cached_property
    def z(self) -> np.ndarray:
        z = np.linspace(self.z_min, self.z_max, self.n_points)
        z.setflags(write=False)
        return z

    def trapezoid(self, values) -> float | complex:
        values = np.asarray(values)
        return self.spacing * (values.sum() - 0.5 * (values[0] + values[-1]))

    def check_same(self, other: Grid1D) -> None:
        if self != other:
            raise UsageError(f"grid mismatch: {self} vs {other}")

    @classmethod
    def from_coordinates(cls, z, rtol: float = 1e-9) -> Grid1D:
        """Recover a grid from sampled coordinates, rejecting non-uniform spacing."""
        z = np.asarray(z, dtype=float)
        if z.ndim != 1 or z.size < 2:
            raise UsageError("need at least two coordinates")
        grid = cls(float(z[0]), float(z[-1]), z.size)
        if not np.allclose(z, grid.z, rtol=0.0, atol=rtol * max(grid.length, 1.0)):
            raise UsageError("coordinates are not uniformly spaced")
        return grid


def frozen(array, dtype=None) -> np.ndarray:
    """Read-only copy of ``array``."""
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out
