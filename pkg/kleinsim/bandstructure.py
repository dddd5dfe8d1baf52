"""Bloch bands of the bichromatic lattice and the effective Dirac parameters.

The lattice V(z) = v1/2 cos(2z) + v2/2 cos(4z + phi) (z in 1/k, energies in
E_r) is diagonalised in the truncated plane-wave basis e^{i(q+2n)z},
n in [-n_cut, n_cut]. Bands are indexed by ascending energy at each q; the
first and second excited bands are indices 1 and 2.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from math import inf, pi, sqrt
from pathlib import Path

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.optimize import least_squares, minimize_scalar

from .const import (
    CROSSING_SCAN_POINTS,
    CROSSING_XTOL,
    DEFAULT_FIT_HALFWIDTH,
    DEFAULT_N_CUT,
    FIT_RESIDUAL_MAX,
    FIT_SAMPLES,
    GAP_DIVERGENCE,
)
from .exceptions import EigensolverError, FitError, InvalidParameterError

_LOGGER = logging.getLogger(__name__)

type ComplexMatrix = NDArray[np.complex128]
type FloatArray = NDArray[np.float64]

HERMITIAN_ATOL = 1e-12


@dataclass(frozen=True)
class LatticeParams:
    """Fourier amplitudes (E_r) and relative phase (rad) of the lattice."""

    v1: float
    v2: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        if self.v1 < 0 or self.v2 < 0:
            raise InvalidParameterError(
                f"Lattice amplitudes must be non-negative, got v1={self.v1}, v2={self.v2}"
            )
        phi = self.phi % (2 * pi)
        if phi >= 2 * pi:
            phi = 0.0
        object.__setattr__(self, "phi", phi)

    def potential(self, z: FloatArray) -> FloatArray:
        """Evaluate V(z) on a grid of positions in 1/k."""
        return self.v1 / 2 * np.cos(2 * z) + self.v2 / 2 * np.cos(4 * z + self.phi)


@dataclass(frozen=True)
class BlochMatrix:
    """Hermitian plane-wave Hamiltonian at one quasimomentum.

    Row/column i holds the plane wave with n = i - n_cut.
    """

    n_cut: int
    q: float
    entries: ComplexMatrix

    @property
    def dimension(self) -> int:
        return 2 * self.n_cut + 1

    def banded(self) -> ComplexMatrix:
        """Lower banded storage (3 x dim) for `scipy.linalg.eig_banded`."""
        dim = self.dimension
        band = np.zeros((3, dim), dtype=np.complex128)
        for offset in range(3):
            band[offset, : dim - offset] = np.diagonal(self.entries, -offset)
        return band


@dataclass(frozen=True)
class BandSolution:
    """Band energies and Bloch vectors over a quasimomentum grid.

    `energies` has shape (n_q, n_bands); `vectors` has shape
    (n_q, 2*n_cut+1, n_bands) with columns ordered like the energies.
    """

    q_grid: FloatArray
    energies: FloatArray
    vectors: ComplexMatrix
    n_cut: int

    @property
    def n_bands(self) -> int:
        return self.energies.shape[1]


@dataclass(frozen=True)
class DiracParams:
    """Parameters of the effective one-dimensional Dirac Hamiltonian.

    Energies in E_r, c_eff in E_r/(hbar k), lengths in 1/k. `rest_energy`
    (m_eff c_eff^2) and `compton_wavelength` are derived from `gap`.
    """

    gap: float
    c_eff: float
    crossing_energy: float = 0.0
    crossing_q: float = 0.0
    fit_residual: float = 0.0
    curvature: float = 0.0
    rest_energy: float = field(init=False)
    compton_wavelength: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.gap >= 0:
            raise InvalidParameterError(f"gap must be non-negative, got {self.gap}")
        if not self.c_eff > 0:
            raise InvalidParameterError(f"c_eff must be positive, got {self.c_eff}")
        object.__setattr__(self, "rest_energy", self.gap / 2)
        compton = inf if self.compton_diverges else 2 * self.c_eff * 2 * pi / self.gap
        object.__setattr__(self, "compton_wavelength", compton)

    @property
    def compton_diverges(self) -> bool:
        return self.gap < GAP_DIVERGENCE


def _bloch_stack(q: FloatArray, lat: LatticeParams, n_cut: int) -> ComplexMatrix:
    """Build Bloch matrices for every q at once, shape (n_q, dim, dim)."""
    dim = 2 * n_cut + 1
    n = np.arange(-n_cut, n_cut + 1)
    stack = np.zeros((q.size, dim, dim), dtype=np.complex128)
    idx = np.arange(dim)
    stack[:, idx, idx] = (q[:, None] + 2 * n[None, :]) ** 2
    first = lat.v1 / 4
    stack[:, idx[1:], idx[:-1]] = first
    stack[:, idx[:-1], idx[1:]] = first
    second = lat.v2 / 4 * np.exp(1j * lat.phi)
    # entry(n+2, n) carries e^{+i phi}
    stack[:, idx[2:], idx[:-2]] = second
    stack[:, idx[:-2], idx[2:]] = np.conj(second)
    return stack


def build_bloch_matrix(q: float, lat: LatticeParams, n_cut: int) -> BlochMatrix:
    """Plane-wave Hamiltonian of the lattice at quasimomentum `q` (hbar k)."""
    if n_cut < 2:
        raise InvalidParameterError(
            f"n_cut must be at least 2 to represent the 4kz harmonic, got {n_cut}"
        )
    entries = _bloch_stack(np.array([q], dtype=float), lat, n_cut)[0]
    return BlochMatrix(n_cut=n_cut, q=q, entries=entries)


def eigensolve(m: BlochMatrix | ComplexMatrix) -> tuple[FloatArray, ComplexMatrix]:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns).

    Bloch matrices go through the banded LAPACK driver; other Hermitian
    matrices through the dense one. Both use LAPACK's implicit QL/QR
    iteration, which gives up after 30 sweeps per eigenvalue and is then
    reported as an `EigensolverError`.
    """
    try:
        if isinstance(m, BlochMatrix):
            values, vectors = scipy.linalg.eig_banded(m.banded(), lower=True)
        else:
            matrix = np.asarray(m, dtype=np.complex128)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise InvalidParameterError(f"Expected a square matrix, got {matrix.shape}")
            scale = max(float(np.abs(matrix).max()), 1.0)
            if not np.allclose(matrix, matrix.conj().T, rtol=0, atol=HERMITIAN_ATOL * scale):
                raise InvalidParameterError("Matrix is not Hermitian")
            values, vectors = scipy.linalg.eigh(matrix)
    except np.linalg.LinAlgError as err:
        raise EigensolverError(f"Hermitian eigensolver did not converge: {err}") from err
    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order]


def band_energies(
    q: float, lat: LatticeParams, n_bands: int, n_cut: int = DEFAULT_N_CUT
) -> FloatArray:
    """Lowest `n_bands` band energies at quasimomentum `q`, ascending."""
    if not 1 <= n_bands <= 2 * n_cut + 1:
        raise InvalidParameterError(
            f"n_bands must lie in [1, {2 * n_cut + 1}] for n_cut={n_cut}, got {n_bands}"
        )
    values, _ = eigensolve(build_bloch_matrix(q, lat, n_cut))
    return values[:n_bands]


def band_scan(
    lat: LatticeParams,
    q_grid: FloatArray,
    n_bands: int,
    n_cut: int = DEFAULT_N_CUT,
) -> BandSolution:
    """Diagonalise the Bloch matrices on a whole quasimomentum grid."""
    if n_cut < 2:
        raise InvalidParameterError(f"n_cut must be at least 2, got {n_cut}")
    if not 1 <= n_bands <= 2 * n_cut + 1:
        raise InvalidParameterError(
            f"n_bands must lie in [1, {2 * n_cut + 1}] for n_cut={n_cut}, got {n_bands}"
        )
    q_grid = np.asarray(q_grid, dtype=float)
    try:
        values, vectors = np.linalg.eigh(_bloch_stack(q_grid, lat, n_cut))
    except np.linalg.LinAlgError as err:
        raise EigensolverError(f"Hermitian eigensolver did not converge: {err}") from err
    return BandSolution(
        q_grid=q_grid,
        energies=values[:, :n_bands],
        vectors=vectors[:, :, :n_bands],
        n_cut=n_cut,
    )


def _gap_at(q: float, lat: LatticeParams, n_cut: int) -> float:
    energies = band_energies(q, lat, 3, n_cut)
    return float(energies[2] - energies[1])


def excited_gap(lat: LatticeParams, n_cut: int = DEFAULT_N_CUT) -> tuple[float, float]:
    """Minimum splitting between the first and second excited bands.

    Scans q on a uniform grid of CROSSING_SCAN_POINTS points in [-1, 1] and
    refines around the best grid point with a bounded Brent/golden-section
    search to CROSSING_XTOL. Returns (gap, crossing_q).
    """
    q_grid = np.linspace(-1.0, 1.0, CROSSING_SCAN_POINTS)
    bands = band_scan(lat, q_grid, 3, n_cut).energies
    gaps = bands[:, 2] - bands[:, 1]
    best = int(np.argmin(gaps))
    gap, crossing_q = float(gaps[best]), float(q_grid[best])

    lower = q_grid[max(best - 1, 0)]
    upper = q_grid[min(best + 1, q_grid.size - 1)]
    refined = minimize_scalar(
        _gap_at,
        bounds=(lower, upper),
        args=(lat, n_cut),
        method="bounded",
        options={"xatol": CROSSING_XTOL},
    )
    if refined.success and refined.fun < gap:
        gap, crossing_q = float(refined.fun), float(refined.x)

    _LOGGER.debug("Excited gap %.6g E_r at q=%.6g for %s", gap, crossing_q, lat)
    return max(gap, 0.0), crossing_q


def _dirac_branches(params: FloatArray, dq: FloatArray) -> tuple[FloatArray, FloatArray]:
    e0, curvature, half_gap, c_eff = params
    background = e0 + curvature * dq**2
    split = np.sqrt(half_gap**2 + (c_eff * dq) ** 2)
    return background - split, background + split


def fit_dirac(
    lat: LatticeParams,
    n_cut: int = DEFAULT_N_CUT,
    fit_halfwidth: float = DEFAULT_FIT_HALFWIDTH,
    strict: bool = True,
) -> DiracParams:
    """Fit E_{1,2}(q) = E0 + a*dq^2 -/+ sqrt((gap/2)^2 + (c_eff*dq)^2) near the crossing.

    The common curvature `a` only absorbs the background parabola of both
    bands. The gap reported is the directly computed minimum splitting.
    Raises `FitError` when the RMS residual exceeds FIT_RESIDUAL_MAX, unless
    `strict` is False, in which case the residual is logged and kept in
    `DiracParams.fit_residual`.
    """
    if not fit_halfwidth > 0:
        raise InvalidParameterError(f"fit_halfwidth must be positive, got {fit_halfwidth}")

    gap, crossing_q = excited_gap(lat, n_cut)
    dq = np.linspace(-fit_halfwidth, fit_halfwidth, FIT_SAMPLES)
    bands = band_scan(lat, crossing_q + dq, 3, n_cut).energies
    lower, upper = bands[:, 1], bands[:, 2]

    centre = FIT_SAMPLES // 2
    edge_split = 0.5 * float(upper[-1] - lower[-1])
    c_guess = sqrt(max(edge_split**2 - (gap / 2) ** 2, 1e-12)) / fit_halfwidth
    initial = np.array(
        [0.5 * float(lower[centre] + upper[centre]), 0.0, gap / 2, max(c_guess, 1e-3)]
    )

    def residuals(params: FloatArray) -> FloatArray:
        model_lower, model_upper = _dirac_branches(params, dq)
        return np.concatenate([model_lower - lower, model_upper - upper])

    result = least_squares(
        residuals,
        initial,
        bounds=([-np.inf, -np.inf, 0.0, 1e-6], [np.inf, np.inf, np.inf, np.inf]),
    )
    residual = float(np.sqrt(np.mean(result.fun**2)))
    e0, curvature, _, c_eff = (float(value) for value in result.x)

    if residual > FIT_RESIDUAL_MAX:
        message = (
            f"Dirac fit residual {residual:.3g} E_r exceeds {FIT_RESIDUAL_MAX} E_r "
            f"for {lat}; parameters are far from the Dirac regime"
        )
        if strict:
            raise FitError(message, residual)
        _LOGGER.warning(message)

    params = DiracParams(
        gap=gap,
        c_eff=c_eff,
        crossing_energy=e0,
        crossing_q=crossing_q,
        fit_residual=residual,
        curvature=curvature,
    )
    _LOGGER.debug(
        "Dirac fit: gap=%.4g c_eff=%.4g E0=%.4g residual=%.2g",
        params.gap,
        params.c_eff,
        params.crossing_energy,
        residual,
    )
    return params


def write_band_csv(solution: BandSolution, path: Path) -> None:
    """Write `q,E0,E1,...` rows with 12 significant digits."""
    header = ["q", *(f"E{band}" for band in range(solution.n_bands))]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for q, energies in zip(solution.q_grid, solution.energies, strict=True):
            writer.writerow([f"{q:.12g}", *(f"{energy:.12g}" for energy in energies)])
    _LOGGER.info("Wrote %d band rows to %s", solution.q_grid.size, path)
