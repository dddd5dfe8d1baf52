"""Recoil unit system and SI conversions.

Everything downstream of this module works in dimensionless recoil units:
energy in E_r, length in 1/k, time in hbar/E_r, momentum in hbar*k and
velocity in E_r/(hbar*k). Only this module touches SI values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import StrEnum
from math import isclose, pi
from typing import NamedTuple

from scipy import constants

from .const import DEFAULT_WAVELENGTH_NM, RB87_MASS_U
from .exceptions import InvalidParameterError

_LOGGER = logging.getLogger(__name__)

PLANCK_RELATION_RTOL = 1e-12


class Quantity(StrEnum):
    """Dimensional quantities convertible between SI and recoil units."""

    LENGTH = "length"
    TIME = "time"
    ENERGY = "energy"
    VELOCITY = "velocity"


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants of the simulated atom and lattice laser.

    Defaults are Rb-87 in a 783 nm lattice with CODATA values from
    `scipy.constants`; hbar is derived from h so the Planck relation holds
    to machine precision.
    """

    wavelength: float = DEFAULT_WAVELENGTH_NM * constants.nano
    atom_mass: float = RB87_MASS_U * constants.atomic_mass
    hbar: float = constants.hbar
    planck_h: float = constants.h
    gravity: float = constants.g

    def __post_init__(self) -> None:
        for name in ("wavelength", "atom_mass", "hbar", "planck_h"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(
                    f"{name} must be strictly positive, got {getattr(self, name)}"
                )
        # g = 0 switches gravity off
        if not self.gravity >= 0:
            raise InvalidParameterError(
                f"gravity must not be negative, got {self.gravity}"
            )
        if not isclose(self.planck_h, 2 * pi * self.hbar, rel_tol=PLANCK_RELATION_RTOL):
            raise InvalidParameterError(
                f"planck_h={self.planck_h} is not 2*pi*hbar={2 * pi * self.hbar}"
            )


@dataclass(frozen=True)
class RecoilScale:
    """Recoil units derived from a set of physical constants."""

    k: float
    E_r: float
    hbar: float
    length_unit: float = field(init=False)
    time_unit: float = field(init=False)
    velocity_unit: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "length_unit", 1.0 / self.k)
        object.__setattr__(self, "time_unit", self.hbar / self.E_r)
        object.__setattr__(self, "velocity_unit", self.E_r / (self.hbar * self.k))

    def unit(self, quantity: Quantity) -> float:
        """Return the SI size of one recoil unit of `quantity`."""
        match quantity:
            case Quantity.LENGTH:
                return self.length_unit
            case Quantity.TIME:
                return self.time_unit
            case Quantity.ENERGY:
                return self.E_r
            case Quantity.VELOCITY:
                return self.velocity_unit
        raise InvalidParameterError(f"Unknown quantity {quantity}")

    def to_dimensionless(self, value: float, quantity: Quantity) -> float:
        return value / self.unit(quantity)

    def to_physical(self, value: float, quantity: Quantity) -> float:
        return value * self.unit(quantity)


class EffectiveLightSpeed(NamedTuple):
    si: float
    dimensionless: float


def recoil_scale(c: PhysicalConstants) -> RecoilScale:
    """Return k = 2*pi/lambda, E_r = hbar^2 k^2 / 2m and the derived units."""
    k = 2 * pi / c.wavelength
    e_r = c.hbar**2 * k**2 / (2 * c.atom_mass)
    scale = RecoilScale(k=k, E_r=e_r, hbar=c.hbar)
    _LOGGER.debug(
        "Recoil scale: k=%.6e 1/m, E_r/h=%.3f Hz, time unit=%.3e s",
        k,
        e_r / c.planck_h,
        scale.time_unit,
    )
    return scale


def gravity_slope(c: PhysicalConstants) -> float:
    """Dimensionless gravitational force m*g/(k*E_r), the slope of -z in V_slow."""
    scale = recoil_scale(c)
    return c.atom_mass * c.gravity / (scale.k * scale.E_r)


def c_eff_physical(c: PhysicalConstants) -> EffectiveLightSpeed:
    """Effective light speed 2*hbar*k/m in SI and in E_r/(hbar*k)."""
    scale = recoil_scale(c)
    si = 2 * c.hbar * scale.k / c.atom_mass
    return EffectiveLightSpeed(si=si, dimensionless=si / scale.velocity_unit)
