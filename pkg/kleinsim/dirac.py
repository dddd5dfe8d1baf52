"""Propagation of the effective Dirac equation and barrier transmission.

H = m c^2 sigma_z + c q sigma_x + V_slow(z) acting on spinors (psi_2, psi_1),
integrated with Strang splitting: half potential step, exact 2x2 kinetic
step per momentum mode, half potential step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from math import exp, inf, pi, sqrt
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.fft
from scipy.optimize import brentq

from .bandstructure import DiracParams
from .const import ACCURACY_BOUND, DIRAC_MAGIC, NORM_DRIFT_MAX
from .exceptions import (
    ClassicallyForbiddenError,
    ClippedPacketError,
    DegenerateStateError,
    InvalidParameterError,
    NormDriftError,
)
from .export import read_snapshot, write_profile_csv, write_snapshot
from .grid import (
    ComplexArray,
    FloatArray,
    GridSpec,
    WaveField,
    absorb,
    check_accuracy_bound,
)

_LOGGER = logging.getLogger(__name__)

CLIP_SIGMAS = 5.0
SEMICLASSICAL_SAMPLES = 2001


@dataclass(frozen=True)
class SlowPotential:
    """Gaussian dipole trap plus gravity.

    V(z) = -v0 exp(-2((z - z_center)/w0)^2) - grav (z - z_center) + offset
    """

    v0: float
    w0: float
    grav: float
    z_center: float = 0.0
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.v0 < 0:
            raise InvalidParameterError(f"v0 must be non-negative, got {self.v0}")
        if not self.w0 > 0:
            raise InvalidParameterError(f"w0 must be positive, got {self.w0}")
        if self.grav < 0:
            raise InvalidParameterError(f"grav must be non-negative, got {self.grav}")

    def __call__(self, z: FloatArray | float) -> FloatArray:
        u = np.asarray(z, dtype=float) - self.z_center
        return -self.v0 * np.exp(-2 * (u / self.w0) ** 2) - self.grav * u + self.offset

    def slope(self, z: FloatArray | float) -> FloatArray:
        """dV/dz."""
        u = np.asarray(z, dtype=float) - self.z_center
        return 4 * self.v0 * u / self.w0**2 * np.exp(-2 * (u / self.w0) ** 2) - self.grav


class BarrierGeometry(NamedTuple):
    """Trap minimum and barrier maximum on the downhill side of gravity."""

    z_min: float
    z_max: float
    height: float


def barrier_extrema(pot: SlowPotential) -> BarrierGeometry | None:
    """Locate the local minimum and maximum of V_slow by derivative root finding.

    With grav = 0 the maximum sits at infinity and the height is v0.
    Returns None when gravity leaves no barrier.
    """
    if pot.v0 == 0:
        return None
    if pot.grav == 0:
        return BarrierGeometry(pot.z_center, inf, pot.v0)

    def slope(u: float) -> float:
        return float(pot.slope(pot.z_center + u))

    # the dipole force term peaks at u = w0/2
    u_peak = pot.w0 / 2
    if slope(u_peak) <= 0:
        return None
    u_min = brentq(slope, 0.0, u_peak, xtol=1e-12)
    u_hi = 2 * u_peak
    while slope(u_hi) > 0:
        u_hi *= 2
    u_max = brentq(slope, u_peak, u_hi, xtol=1e-12)
    z_min, z_max = pot.z_center + u_min, pot.z_center + u_max
    height = float(pot(z_max) - pot(z_min))
    return BarrierGeometry(z_min, z_max, height)


@dataclass
class SpinorField:
    """Two-component wavefunction on a grid, components (psi_2, psi_1)."""

    grid: GridSpec
    psi_upper: ComplexArray
    psi_lower: ComplexArray
    time: float = 0.0
    absorbed_left: float = 0.0
    absorbed_right: float = 0.0

    def density(self) -> FloatArray:
        return np.abs(self.psi_upper) ** 2 + np.abs(self.psi_lower) ** 2

    @property
    def norm(self) -> float:
        """Probability still inside the domain."""
        return self.grid.integrate(self.density())

    @property
    def total_norm(self) -> float:
        return self.norm + self.absorbed_left + self.absorbed_right

    def centroid(self) -> float:
        rho = self.density()
        return float(np.sum(self.grid.z * rho) / np.sum(rho))

    def copy(self) -> SpinorField:
        return replace(
            self, psi_upper=self.psi_upper.copy(), psi_lower=self.psi_lower.copy()
        )


@dataclass(frozen=True)
class TransmissionResult:
    """Fractions of the packet beyond, behind and between the detection planes."""

    transmitted: float
    reflected: float
    remaining: float
    detect_z: float
    time: float


def positive_energy_spinor(q: float, d: DiracParams) -> tuple[float, float]:
    """Unit eigenvector of m c^2 sigma_z + c q sigma_x with positive eigenvalue.

    The first component is real and positive.
    """
    mass = d.rest_energy
    kinetic = d.c_eff * q
    energy = sqrt(mass**2 + kinetic**2)
    if energy == 0:
        raise DegenerateStateError(
            "Positive-energy spinor is undefined at q=0 with a closed gap"
        )
    upper, lower = mass + energy, kinetic
    norm = sqrt(upper**2 + lower**2)
    return upper / norm, lower / norm


def init_packet(
    grid: GridSpec, q0: float, sigma_z: float, z0: float, d: DiracParams
) -> SpinorField:
    """Gaussian packet exp(-(z-z0)^2/(4 sigma_z^2)) e^{i q0 z} on the upper branch at q0."""
    if not sigma_z > 0:
        raise InvalidParameterError(f"sigma_z must be positive, got {sigma_z}")
    if not -1.0 <= q0 <= 1.0:
        raise InvalidParameterError(f"q0 must lie in the first zone [-1, 1], got {q0}")
    if z0 - CLIP_SIGMAS * sigma_z < grid.z_min or z0 + CLIP_SIGMAS * sigma_z > grid.z_max:
        raise ClippedPacketError(
            f"Packet at z0={z0} with sigma_z={sigma_z} is clipped by "
            f"[{grid.z_min}, {grid.z_max}]"
        )
    if not grid.resolves_packet(sigma_z):
        raise InvalidParameterError(
            f"Momentum spacing {grid.dk:.3g} does not resolve a packet of width "
            f"sigma_z={sigma_z}; enlarge the domain"
        )

    upper, lower = positive_energy_spinor(q0, d)
    z = grid.z
    envelope = np.exp(-((z - z0) ** 2) / (4 * sigma_z**2) + 1j * q0 * z)
    norm = sqrt(grid.integrate(np.abs(envelope) ** 2))
    envelope /= norm
    _LOGGER.debug(
        "Initial Dirac packet: q0=%.4g sigma_z=%.4g z0=%.4g spinor=(%.4f, %.4f)",
        q0,
        sigma_z,
        z0,
        upper,
        lower,
    )
    return SpinorField(grid=grid, psi_upper=upper * envelope, psi_lower=lower * envelope)


def _kinetic_propagator(
    k: FloatArray, d: DiracParams, dt: float
) -> tuple[ComplexArray, ComplexArray, ComplexArray]:
    """Entries (U00, U01, U11) of exp(-i (m sigma_z + c k sigma_x) dt) per mode."""
    mass = d.rest_energy
    kinetic = d.c_eff * k
    omega = np.sqrt(mass**2 + kinetic**2)
    safe = np.where(omega > 0, omega, 1.0)
    cos = np.cos(omega * dt)
    sin_over = np.where(omega > 0, np.sin(omega * dt) / safe, dt)
    return cos - 1j * sin_over * mass, -1j * sin_over * kinetic, cos + 1j * sin_over * mass


def evolve(
    f: SpinorField,
    pot: SlowPotential,
    d: DiracParams,
    dt: float,
    n_steps: int,
    absorber: bool = False,
) -> SpinorField:
    """Advance `f` by n_steps Strang steps of size dt and return the new field.

    Negative dt runs backwards in time and requires the absorber off.
    """
    if dt == 0 or n_steps < 0:
        raise InvalidParameterError(f"Need dt != 0 and n_steps >= 0, got {dt}, {n_steps}")
    if absorber and dt < 0:
        raise InvalidParameterError("Absorbing boundaries require dt > 0")
    grid = f.grid
    potential = pot(grid.z)
    check_accuracy_bound(potential, dt, ACCURACY_BOUND)

    half_phase = np.exp(-0.5j * potential * dt)
    u00, u01, u11 = _kinetic_propagator(grid.k, d, dt)
    mask = grid.absorber_mask(dt) if absorber else None

    out = f.copy()
    upper, lower = out.psi_upper, out.psi_lower
    start = f.total_norm
    _LOGGER.debug("Dirac evolve: %d steps of dt=%.3g from t=%.6g", n_steps, dt, f.time)

    for _ in range(n_steps):
        upper *= half_phase
        lower *= half_phase
        a = scipy.fft.fft(upper)
        b = scipy.fft.fft(lower)
        upper[:] = scipy.fft.ifft(u00 * a + u01 * b)
        lower[:] = scipy.fft.ifft(u01 * a + u11 * b)
        upper *= half_phase
        lower *= half_phase
        if mask is not None:
            left, right = absorb(grid, mask, [upper, lower])
            out.absorbed_left += left
            out.absorbed_right += right

    out.time = f.time + n_steps * dt
    drift = abs(out.total_norm - start)
    if not drift <= NORM_DRIFT_MAX:
        raise NormDriftError(f"Norm drifted by {drift:.3g} over {n_steps} steps")
    return out


def _cells_above(grid: GridSpec, z: float) -> FloatArray:
    """Fraction of each grid cell [z_i - dz/2, z_i + dz/2) lying above z."""
    return np.clip((grid.z + 0.5 * grid.dz - z) / grid.dz, 0.0, 1.0)


def transmission(
    f: WaveField, detect_z: float, reflect_z: float | None = None
) -> TransmissionResult:
    """Split the probability at the detection plane.

    transmitted: z > detect_z plus absorbed_right. reflected: absorbed_left,
    plus z < reflect_z when given (the packet tail behind reflect_z at t=0
    counts as reflected). remaining: the rest. Fractions are relative to the
    total norm and sum to one.
    """
    grid = f.grid
    if not grid.contains(detect_z):
        raise InvalidParameterError(f"detect_z={detect_z} lies outside the domain")
    if reflect_z is not None and reflect_z > detect_z:
        raise InvalidParameterError(
            f"reflect_z={reflect_z} must not lie beyond detect_z={detect_z}"
        )
    rho = f.density()
    total = f.total_norm
    transmitted = (grid.integrate(rho * _cells_above(grid, detect_z)) + f.absorbed_right) / total
    reflected = f.absorbed_left
    if reflect_z is not None:
        reflected += grid.integrate(rho * (1.0 - _cells_above(grid, reflect_z)))
    reflected /= total
    return TransmissionResult(
        transmitted=transmitted,
        reflected=reflected,
        remaining=1.0 - transmitted - reflected,
        detect_z=detect_z,
        time=f.time,
    )


def landau_zener_transmission(d: DiracParams, force: float) -> float:
    """Single Landau-Zener passage probability exp(-pi (m c^2)^2 / (c_eff F))."""
    if not force > 0:
        raise InvalidParameterError(f"force must be positive, got {force}")
    return exp(-pi * d.rest_energy**2 / (d.c_eff * force))


def double_landau_zener(d: DiracParams, force: float) -> float:
    """Two independent passages, one on each barrier edge; a diagnostic only."""
    return landau_zener_transmission(d, force) ** 2


class SemiclassicalRange(NamedTuple):
    q_min: float
    q_max: float
    zone_edge: bool


def semiclassical_q_range(
    E_total: float,
    pot: SlowPotential,
    d: DiracParams,
    z_range: tuple[float, float],
) -> SemiclassicalRange:
    """Quasimomenta met along z_range when E_total is conserved.

    Uses q(z) = sign(E - V) sqrt((E - V)^2 - (mc^2)^2) / c_eff, which
    continues onto the lower branch once the energy drops below the
    crossing. Points inside the gap are skipped. `zone_edge` flags |q| >= 1.
    """
    z = np.linspace(z_range[0], z_range[1], SEMICLASSICAL_SAMPLES)
    kinetic = E_total - pot(z)
    mass = d.rest_energy
    allowed = np.abs(kinetic) >= mass
    if not allowed.any():
        raise ClassicallyForbiddenError(
            f"E_total={E_total} lies inside the gap over the whole range {z_range}"
        )
    if not allowed[0] or kinetic[0] <= 0:
        raise InvalidParameterError(
            f"E_total={E_total} is not an upper-branch propagating state at z={z[0]}"
        )
    k = kinetic[allowed]
    q = np.sign(k) * np.sqrt(k**2 - mass**2) / d.c_eff
    q_min, q_max = float(q.min()), float(q.max())
    return SemiclassicalRange(q_min, q_max, q_min <= -1.0 or q_max >= 1.0)


def mean_energy(f: SpinorField, pot: SlowPotential, d: DiracParams) -> float:
    """<H> per unit in-domain probability, measured from the band crossing."""
    grid = f.grid
    potential = grid.integrate(pot(grid.z) * f.density())
    a = scipy.fft.fft(f.psi_upper)
    b = scipy.fft.fft(f.psi_lower)
    mass, kinetic = d.rest_energy, d.c_eff * grid.k
    h_ab = np.conj(a) * (mass * a + kinetic * b) + np.conj(b) * (kinetic * a - mass * b)
    kinetic_energy = float(np.sum(h_ab.real)) * grid.dz / grid.n_points
    return (potential + kinetic_energy) / f.norm


def write_dirac_snapshot(f: SpinorField, path: Path) -> None:
    write_snapshot(path, DIRAC_MAGIC, f.grid, f.time, [f.psi_upper, f.psi_lower])


def read_dirac_snapshot(path: Path) -> SpinorField:
    grid, time, (upper, lower) = read_snapshot(path, DIRAC_MAGIC, 2)
    return SpinorField(grid=grid, psi_upper=upper, psi_lower=lower, time=time)


def write_dirac_density_csv(f: SpinorField, pot: SlowPotential, path: Path) -> None:
    write_profile_csv(
        path,
        {
            "z": f.grid.z,
            "density_upper": np.abs(f.psi_upper) ** 2,
            "density_lower": np.abs(f.psi_lower) ** 2,
            "V_slow": pot(f.grid.z),
        },
    )
