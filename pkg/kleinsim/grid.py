"""Uniform periodic grids and absorbing boundaries shared by both engines."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import pi
from typing import Protocol

import numpy as np
from numpy.typing import NDArray

from .const import ABSORBER_FRACTION, ABSORBER_STRENGTH, MIN_GRID_POINTS, POINTS_PER_SIGMA
from .exceptions import InvalidParameterError


type FloatArray = NDArray[np.float64]
type ComplexArray = NDArray[np.complex128]


@dataclass(frozen=True)
class GridSpec:
    """Spatial domain [z_min, z_max) in 1/k sampled at `n_points` points."""

    z_min: float
    z_max: float
    n_points: int

    def __post_init__(self) -> None:
        if not self.z_max > self.z_min:
            raise InvalidParameterError(
                f"z_max ({self.z_max}) must exceed z_min ({self.z_min})"
            )
        if self.n_points < MIN_GRID_POINTS or self.n_points & (self.n_points - 1):
            raise InvalidParameterError(
                f"n_points must be a power of two >= {MIN_GRID_POINTS}, got {self.n_points}"
            )

    @property
    def length(self) -> float:
        return self.z_max - self.z_min

    @property
    def dz(self) -> float:
        return self.length / self.n_points

    @property
    def dk(self) -> float:
        return 2 * pi / self.length

    @cached_property
    def z(self) -> FloatArray:
        return self.z_min + self.dz * np.arange(self.n_points)

    @cached_property
    def k(self) -> FloatArray:
        """Momenta (hbar k) in FFT order."""
        return 2 * pi * np.fft.fftfreq(self.n_points, d=self.dz)

    @property
    def k_max(self) -> float:
        return pi / self.dz

    def contains(self, z: float) -> bool:
        return self.z_min <= z < self.z_max

    def resolves_packet(self, sigma_z: float) -> bool:
        """True if the momentum spacing puts >= POINTS_PER_SIGMA points per packet std."""
        return 1 / (2 * sigma_z) >= POINTS_PER_SIGMA * self.dk

    def absorber_mask(self, dt: float, strength: float = ABSORBER_STRENGTH) -> FloatArray:
        """Cosine-ramp amplitude mask over the outer ABSORBER_FRACTION on each side.

        The ramp is raised to the power strength*|dt| so the absorption per
        unit time does not depend on the step size.
        """
        width = ABSORBER_FRACTION * self.length
        depth = np.maximum(
            (self.z_min + width) - self.z, self.z - (self.z_max - self.dz - width)
        )
        xi = np.clip(depth / width, 0.0, 1.0)
        return np.cos(0.5 * pi * xi) ** (strength * abs(dt))

    def integrate(self, density: FloatArray) -> float:
        return float(np.sum(density) * self.dz)


def check_accuracy_bound(potential: FloatArray, dt: float, bound: float) -> None:
    """Reject steps for which |dt| * max|V| exceeds `bound`."""
    worst = float(np.max(np.abs(potential))) * abs(dt)
    if worst >= bound:
        raise InvalidParameterError(
            f"dt*max|V| = {worst:.3g} violates the accuracy bound {bound}; reduce dt"
        )


def absorb(
    grid: GridSpec, mask: FloatArray, components: list[ComplexArray]
) -> tuple[float, float]:
    """Apply `mask` in place and return the probability removed (left, right)."""
    before = sum(np.abs(c) ** 2 for c in components)
    for component in components:
        component *= mask
    removed = before * (1.0 - mask**2)
    half = grid.n_points // 2
    return grid.integrate(removed[:half]), grid.integrate(removed[half:])


class WaveField(Protocol):
    """Anything carrying a density on a grid plus absorbed probability."""

    grid: GridSpec
    time: float
    absorbed_left: float
    absorbed_right: float

    def density(self) -> FloatArray: ...

    @property
    def total_norm(self) -> float: ...
