"""Scalar Schrodinger propagation in the full lattice plus slow potential.

H = p^2 + V(z) + V_slow(z) in recoil units. Used as the microscopic
reference for the Dirac reduction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from math import pi, sqrt
from pathlib import Path

import numpy as np
import scipy.fft

from .bandstructure import LatticeParams, band_scan
from .const import (
    ACCURACY_BOUND,
    COMPLETENESS_WARN,
    DEFAULT_N_CUT,
    NORM_DRIFT_MAX,
    SCHRODINGER_MAGIC,
)
from .dirac import CLIP_SIGMAS, SlowPotential
from .exceptions import ClippedPacketError, InvalidParameterError, NormDriftError
from .export import read_snapshot, write_profile_csv, write_snapshot
from .grid import ComplexArray, FloatArray, GridSpec, absorb, check_accuracy_bound

_LOGGER = logging.getLogger(__name__)


@dataclass
class ScalarField:
    """One-component wavefunction on a grid."""

    grid: GridSpec
    psi: ComplexArray
    time: float = 0.0
    absorbed_left: float = 0.0
    absorbed_right: float = 0.0

    def density(self) -> FloatArray:
        return np.abs(self.psi) ** 2

    @property
    def norm(self) -> float:
        return self.grid.integrate(self.density())

    @property
    def total_norm(self) -> float:
        return self.norm + self.absorbed_left + self.absorbed_right

    def centroid(self) -> float:
        rho = self.density()
        return float(np.sum(self.grid.z * rho) / np.sum(rho))

    def width(self) -> float:
        """Position standard deviation."""
        rho = self.density()
        mean = self.centroid()
        return sqrt(float(np.sum((self.grid.z - mean) ** 2 * rho) / np.sum(rho)))

    def momentum_expectation(self) -> float:
        weight = np.abs(scipy.fft.fft(self.psi)) ** 2
        return float(np.sum(self.grid.k * weight) / np.sum(weight))

    def copy(self) -> ScalarField:
        return replace(self, psi=self.psi.copy())


def init_gaussian(grid: GridSpec, p0: float, sigma_z: float, z0: float) -> ScalarField:
    """Normalised e^{-(z-z0)^2/(4 sigma_z^2)} e^{i p0 z} with p0 in the lab frame."""
    if not sigma_z > 0:
        raise InvalidParameterError(f"sigma_z must be positive, got {sigma_z}")
    if z0 - CLIP_SIGMAS * sigma_z < grid.z_min or z0 + CLIP_SIGMAS * sigma_z > grid.z_max:
        raise ClippedPacketError(
            f"Packet at z0={z0} with sigma_z={sigma_z} is clipped by "
            f"[{grid.z_min}, {grid.z_max}]"
        )
    if abs(p0) + CLIP_SIGMAS / (2 * sigma_z) > grid.k_max:
        raise InvalidParameterError(
            f"Momentum grid (|k| < {grid.k_max:.4g}) does not cover p0={p0} "
            f"+/- {CLIP_SIGMAS / (2 * sigma_z):.4g}; refine the grid"
        )
    z = grid.z
    psi = np.exp(-((z - z0) ** 2) / (4 * sigma_z**2) + 1j * p0 * z)
    psi /= sqrt(grid.integrate(np.abs(psi) ** 2))
    _LOGGER.debug("Initial Schrodinger packet: p0=%.4g sigma_z=%.4g z0=%.4g", p0, sigma_z, z0)
    return ScalarField(grid=grid, psi=psi)


def evolve_full(
    f: ScalarField,
    lat: LatticeParams,
    pot: SlowPotential,
    dt: float,
    n_steps: int,
    absorber: bool = False,
) -> ScalarField:
    """Strang steps with e^{-i p^2 dt} in momentum space and the full potential in position space."""
    if dt == 0 or n_steps < 0:
        raise InvalidParameterError(f"Need dt != 0 and n_steps >= 0, got {dt}, {n_steps}")
    if absorber and dt < 0:
        raise InvalidParameterError("Absorbing boundaries require dt > 0")
    grid = f.grid
    potential = lat.potential(grid.z) + pot(grid.z)
    check_accuracy_bound(potential, dt, ACCURACY_BOUND)

    half_phase = np.exp(-0.5j * potential * dt)
    kinetic_phase = np.exp(-1j * grid.k**2 * dt)
    mask = grid.absorber_mask(dt) if absorber else None

    out = f.copy()
    psi = out.psi
    start = f.total_norm
    _LOGGER.debug(
        "Schrodinger evolve: %d steps of dt=%.3g from t=%.6g", n_steps, dt, f.time
    )

    for _ in range(n_steps):
        psi *= half_phase
        psi[:] = scipy.fft.ifft(kinetic_phase * scipy.fft.fft(psi))
        psi *= half_phase
        if mask is not None:
            left, right = absorb(grid, mask, [psi])
            out.absorbed_left += left
            out.absorbed_right += right

    out.time = f.time + n_steps * dt
    drift = abs(out.total_norm - start)
    if not drift <= NORM_DRIFT_MAX:
        raise NormDriftError(f"Norm drifted by {drift:.3g} over {n_steps} steps")
    return out


def _plane_wave_amplitudes(f: ScalarField, n_cut: int) -> tuple[FloatArray, ComplexArray]:
    """Continuum Fourier amplitudes at q + 2n for every box quasimomentum q in [-1, 1).

    Returns (q, amplitudes) with amplitudes of shape (2*n_cut+1, n_q).
    """
    grid = f.grid
    k = grid.k
    selected = (k >= -1.0) & (k < 1.0)
    q = k[selected]
    phase = np.exp(-1j * q * grid.z_min) * grid.dz / sqrt(2 * pi)
    amplitudes = np.empty((2 * n_cut + 1, q.size), dtype=np.complex128)
    for row, n in enumerate(range(-n_cut, n_cut + 1)):
        shifted = scipy.fft.fft(f.psi * np.exp(-2j * n * grid.z))
        amplitudes[row] = phase * shifted[selected]
    return q, amplitudes


def band_populations(
    f: ScalarField,
    lat: LatticeParams,
    n_cut: int = DEFAULT_N_CUT,
    n_bands: int = 5,
) -> FloatArray:
    """Probability in each of the lowest `n_bands` Bloch bands.

    Projects onto the Bloch eigenvectors at the quasimomenta of the box.
    Logs a warning when the bands leave more than COMPLETENESS_WARN unaccounted.
    """
    norm = f.norm
    if not norm > 0:
        raise InvalidParameterError("Cannot project an empty field")
    q, amplitudes = _plane_wave_amplitudes(f, n_cut)
    vectors = band_scan(lat, q, n_bands, n_cut).vectors
    projections = np.einsum("qnb,nq->qb", np.conj(vectors), amplitudes)
    populations = np.sum(np.abs(projections) ** 2, axis=0) * f.grid.dk / norm

    deficit = 1.0 - float(np.sum(populations))
    if abs(deficit) > COMPLETENESS_WARN:
        _LOGGER.warning(
            "Band projection leaves %.3g of the probability outside %d bands",
            deficit,
            n_bands,
        )
    return populations


def project_band(
    f: ScalarField, lat: LatticeParams, band: int, n_cut: int = DEFAULT_N_CUT
) -> ScalarField:
    """Keep the component of `f` in Bloch band `band` (0 = lowest), renormalised.

    Exact when the box length is a multiple of the lattice period pi.
    """
    if band < 0:
        raise InvalidParameterError(f"band must be non-negative, got {band}")
    grid = f.grid
    q, amplitudes = _plane_wave_amplitudes(f, n_cut)
    vectors = band_scan(lat, q, band + 1, n_cut).vectors[:, :, band]
    coefficients = np.einsum("qn,nq->q", np.conj(vectors), amplitudes)
    projected = vectors.T * coefficients

    selected = np.flatnonzero((grid.k >= -1.0) & (grid.k < 1.0))
    spectrum = np.zeros(grid.n_points, dtype=np.complex128)
    psi = np.zeros(grid.n_points, dtype=np.complex128)
    for row, n in enumerate(range(-n_cut, n_cut + 1)):
        spectrum[selected] = projected[row] * np.exp(1j * q * grid.z_min)
        psi += np.exp(2j * n * grid.z) * scipy.fft.ifft(spectrum) * grid.n_points
    psi *= grid.dk / sqrt(2 * pi)

    kept = grid.integrate(np.abs(psi) ** 2)
    if not kept > 0:
        raise InvalidParameterError(f"Field has no weight in band {band}")
    _LOGGER.info("Projected packet onto band %d, keeping %.4f of the norm", band, kept / f.norm)
    return replace(f, psi=psi / sqrt(kept))


def write_schrodinger_snapshot(f: ScalarField, path: Path) -> None:
    write_snapshot(path, SCHRODINGER_MAGIC, f.grid, f.time, [f.psi])


def read_schrodinger_snapshot(path: Path) -> ScalarField:
    grid, time, (psi,) = read_snapshot(path, SCHRODINGER_MAGIC, 1)
    return ScalarField(grid=grid, psi=psi, time=time)


def write_schrodinger_density_csv(f: ScalarField, pot: SlowPotential, path: Path) -> None:
    write_profile_csv(
        path, {"z": f.grid.z, "density": f.density(), "V_slow": pot(f.grid.z)}
    )
