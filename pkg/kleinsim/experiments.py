"""Scenarios, sweeps and analytic estimates built from the solvers."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from math import exp, inf, isfinite, isinf, nan, sqrt
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .bandstructure import DiracParams, LatticeParams, fit_dirac
from .const import (
    BARRIER_V0_MAX,
    CONF_ABSORBER,
    CONF_ATOM_MASS,
    CONF_BARRIER_HEIGHT,
    CONF_DETECT_OFFSET,
    CONF_DT,
    CONF_ENGINE,
    CONF_FALL_OFFSET,
    CONF_FIT_HALFWIDTH,
    CONF_GRAVITY,
    CONF_LOAD_BAND,
    CONF_N_CUT,
    CONF_N_CUT_MAX,
    CONF_N_CUT_MIN,
    CONF_N_POINTS,
    CONF_PHI,
    CONF_PHI_POINTS,
    CONF_Q0,
    CONF_SIGMA_Z,
    CONF_TOTAL_TIME,
    CONF_V1,
    CONF_V2,
    CONF_VB_MAX,
    CONF_VB_POINTS,
    CONF_W0,
    CONF_WAVELENGTH,
    CONF_WORKERS,
    CONF_Z_MAX,
    CONF_Z_MIN,
    DEFAULT_BARRIER_HEIGHT,
    DEFAULT_DETECT_OFFSET_W0,
    DEFAULT_DIRAC_DT,
    DEFAULT_DIRAC_POINTS,
    DEFAULT_FALL_OFFSET,
    DEFAULT_FIT_HALFWIDTH,
    DEFAULT_MOMENTUM_WIDTH,
    DEFAULT_N_CUT,
    DEFAULT_PHI,
    DEFAULT_PHI_POINTS,
    DEFAULT_Q0,
    DEFAULT_SCHRODINGER_DT,
    DEFAULT_SCHRODINGER_POINTS,
    DEFAULT_TOTAL_TIME_MS,
    DEFAULT_V1,
    DEFAULT_V2,
    DEFAULT_VB_MAX,
    DEFAULT_VB_POINTS,
    DEFAULT_W0_UM,
    DEFAULT_WORKERS,
    DEFAULT_Z_MAX,
    DEFAULT_Z_MIN,
    ENGINE_DIRAC,
    ENGINE_SCHRODINGER,
    ENGINES,
    FIT_RESIDUAL_MAX,
)
from .coordinator import SweepCoordinator, SweepJob
from .dirac import (
    BarrierGeometry,
    SlowPotential,
    SpinorField,
    TransmissionResult,
    barrier_extrema,
    evolve,
    init_packet,
    semiclassical_q_range,
    transmission,
    write_dirac_density_csv,
    write_dirac_snapshot,
)
from .exceptions import BarrierError, InvalidParameterError, KleinSimError
from .grid import FloatArray, GridSpec, WaveField
from .schrodinger import (
    ScalarField,
    evolve_full,
    init_gaussian,
    project_band,
    write_schrodinger_density_csv,
    write_schrodinger_snapshot,
)
from .units import PhysicalConstants, Quantity, gravity_slope, recoil_scale

_LOGGER = logging.getLogger(__name__)

PROFILE_CSV = "profile.csv"
SNAPSHOT_FILE = "snapshot.bin"
SWEEP_HEADER = (
    "phi",
    "vb",
    "gap",
    "c_eff",
    "compton_um",
    "transmitted",
    "reflected",
    "remaining",
    "zone_edge_flag",
)

COMPARISON_HEADER = ("phi", "transmitted_dirac", "transmitted_schrodinger", "difference")

FLAG_ZONE_EDGE = "zone_edge"
FLAG_FIT_RESIDUAL = "fit_residual"
FLAG_NO_BARRIER = "no_barrier"

# lab momentum of the upper crossing branch is q + 2 (in hbar k)
SCHRODINGER_MOMENTUM_SHIFT = 2.0


def _format(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _default_lattice() -> LatticeParams:
    return LatticeParams(DEFAULT_V1, DEFAULT_V2, DEFAULT_PHI)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a run needs, lengths in 1/k and times in hbar/E_r.

    `w0`, `total_time`, `dt` and `n_points` may be left as None and are
    filled with the default scenario and engine-specific numerics by
    `resolved()`.
    """

    lattice: LatticeParams = field(default_factory=_default_lattice)
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    barrier_height_vb: float = DEFAULT_BARRIER_HEIGHT
    w0: float | None = None
    q0: float = DEFAULT_Q0
    sigma_z: float = 1 / (2 * DEFAULT_MOMENTUM_WIDTH)
    total_time: float | None = None
    engine: str = ENGINE_DIRAC
    dt: float | None = None
    n_points: int | None = None
    z_min: float = DEFAULT_Z_MIN
    z_max: float = DEFAULT_Z_MAX
    n_cut: int = DEFAULT_N_CUT
    fit_halfwidth: float = DEFAULT_FIT_HALFWIDTH
    absorber: bool = True
    load_band: bool = True
    detect_offset_w0: float = DEFAULT_DETECT_OFFSET_W0
    fall_offset: float = DEFAULT_FALL_OFFSET
    workers: int = DEFAULT_WORKERS
    phi_points: int = DEFAULT_PHI_POINTS
    vb_points: int = DEFAULT_VB_POINTS
    vb_max: float = DEFAULT_VB_MAX

    def __post_init__(self) -> None:
        checks = (
            (self.barrier_height_vb >= 0, "barrier_height_vb must be non-negative"),
            (self.w0 is None or self.w0 > 0, "w0 must be positive"),
            (-1.0 <= self.q0 <= 1.0, "q0 must lie in [-1, 1]"),
            (self.sigma_z > 0, "sigma_z must be positive"),
            (self.total_time is None or self.total_time >= 0, "total_time must be >= 0"),
            (self.engine in ENGINES, f"engine must be one of {', '.join(ENGINES)}"),
            (self.dt is None or self.dt > 0, "dt must be positive"),
            (CONF_N_CUT_MIN <= self.n_cut <= CONF_N_CUT_MAX, "n_cut out of range"),
            (self.fit_halfwidth > 0, "fit_halfwidth must be positive"),
            (self.detect_offset_w0 >= 0, "detect_offset_w0 must be non-negative"),
            (self.workers >= 1, "workers must be at least 1"),
            (self.phi_points >= 1, "phi_points must be at least 1"),
            (self.vb_points >= 1, "vb_points must be at least 1"),
            (self.vb_max >= 0, "vb_max must be non-negative"),
        )
        for ok, message in checks:
            if not ok:
                raise InvalidParameterError(message)

    @property
    def is_resolved(self) -> bool:
        return None not in (self.w0, self.total_time, self.dt, self.n_points)

    def resolved(self) -> ScenarioConfig:
        """Return a copy with every default filled in."""
        if self.is_resolved:
            return self
        scale = recoil_scale(self.constants)
        dirac = self.engine == ENGINE_DIRAC
        return replace(
            self,
            w0=self.w0
            if self.w0 is not None
            else scale.to_dimensionless(DEFAULT_W0_UM * 1e-6, Quantity.LENGTH),
            total_time=self.total_time
            if self.total_time is not None
            else scale.to_dimensionless(DEFAULT_TOTAL_TIME_MS * 1e-3, Quantity.TIME),
            dt=self.dt
            if self.dt is not None
            else (DEFAULT_DIRAC_DT if dirac else DEFAULT_SCHRODINGER_DT),
            n_points=self.n_points
            if self.n_points is not None
            else (DEFAULT_DIRAC_POINTS if dirac else DEFAULT_SCHRODINGER_POINTS),
        )

    def grid(self) -> GridSpec:
        cfg = self.resolved()
        assert cfg.n_points is not None
        return GridSpec(cfg.z_min, cfg.z_max, cfg.n_points)

    def echo(self) -> list[str]:
        """`key=value` lines of the resolved configuration, in a fixed order."""
        cfg = self.resolved()
        values: dict[str, object] = {
            CONF_V1: cfg.lattice.v1,
            CONF_V2: cfg.lattice.v2,
            CONF_PHI: cfg.lattice.phi,
            CONF_WAVELENGTH: cfg.constants.wavelength * 1e9,
            CONF_ATOM_MASS: cfg.constants.atom_mass,
            CONF_GRAVITY: cfg.constants.gravity,
            CONF_BARRIER_HEIGHT: cfg.barrier_height_vb,
            CONF_W0: cfg.w0,
            CONF_Q0: cfg.q0,
            CONF_SIGMA_Z: cfg.sigma_z,
            CONF_TOTAL_TIME: cfg.total_time,
            CONF_ENGINE: cfg.engine,
            CONF_DT: cfg.dt,
            CONF_N_POINTS: cfg.n_points,
            CONF_Z_MIN: cfg.z_min,
            CONF_Z_MAX: cfg.z_max,
            CONF_N_CUT: cfg.n_cut,
            CONF_FIT_HALFWIDTH: cfg.fit_halfwidth,
            CONF_ABSORBER: cfg.absorber,
            CONF_LOAD_BAND: cfg.load_band,
            CONF_DETECT_OFFSET: cfg.detect_offset_w0,
            CONF_FALL_OFFSET: cfg.fall_offset,
            CONF_WORKERS: cfg.workers,
            CONF_PHI_POINTS: cfg.phi_points,
            CONF_VB_POINTS: cfg.vb_points,
            CONF_VB_MAX: cfg.vb_max,
        }
        return [f"{key}={_format(value)}" for key, value in values.items()]

    def with_phi(self, phi: float) -> ScenarioConfig:
        return replace(self, lattice=replace(self.lattice, phi=phi))

    def with_barrier(self, vb: float) -> ScenarioConfig:
        return replace(self, barrier_height_vb=vb)


def barrier_threshold(w0: float, grav: float) -> float:
    """Depth at which trap minimum and barrier maximum merge into an inflection."""
    return grav * w0 * exp(0.5) / 2


def barrier_height(pot: SlowPotential) -> float:
    """Inverse of `barrier_from_height`; 0 when gravity leaves no local maximum."""
    geometry = barrier_extrema(pot)
    return 0.0 if geometry is None else geometry.height


def barrier_from_height(
    vb: float, w0: float, grav: float, z_center: float = 0.0
) -> SlowPotential:
    """Find the trap depth v0 whose barrier rises vb above the trap minimum.

    The search bracket runs from the merging threshold g*w0*e^{1/2}/2 up to
    BARRIER_V0_MAX. With grav = 0 the depth equals vb.
    """
    if vb < 0:
        raise InvalidParameterError(f"Barrier height must be non-negative, got {vb}")
    if not w0 > 0:
        raise InvalidParameterError(f"w0 must be positive, got {w0}")
    if grav == 0:
        return SlowPotential(vb, w0, 0.0, z_center)

    threshold = barrier_threshold(w0, grav)
    if vb == 0:
        _LOGGER.warning(
            "Zero barrier height: depth set to the threshold %.6g where trap and barrier merge",
            threshold,
        )
        return SlowPotential(threshold, w0, grav, z_center)
    if threshold > BARRIER_V0_MAX:
        raise BarrierError(
            f"Gravity {grav} needs a depth above {BARRIER_V0_MAX} E_r to form any barrier"
        )

    def excess(v0: float) -> float:
        return barrier_height(SlowPotential(v0, w0, grav, z_center)) - vb

    lower = threshold * (1 + 1e-9)
    if excess(lower) >= 0:
        return SlowPotential(lower, w0, grav, z_center)
    upper = 2 * threshold + vb
    while excess(upper) < 0:
        if upper >= BARRIER_V0_MAX:
            raise BarrierError(
                f"No depth up to {BARRIER_V0_MAX} E_r gives a barrier of {vb} E_r "
                f"(w0={w0}, grav={grav})"
            )
        upper = min(2 * upper, BARRIER_V0_MAX)
    v0 = brentq(excess, lower, upper, xtol=1e-12, rtol=1e-13)
    _LOGGER.debug("Barrier of %.4g E_r needs depth v0=%.6g E_r", vb, v0)
    return SlowPotential(v0, w0, grav, z_center)


def _resolve_geometry(pot: SlowPotential) -> BarrierGeometry:
    if (geometry := barrier_extrema(pot)) is not None:
        return geometry
    if pot.grav == 0:
        return BarrierGeometry(pot.z_center, inf, 0.0)
    # merged extrema sit at the inflection of the dipole force
    z = pot.z_center + pot.w0 / 2
    return BarrierGeometry(z, z, 0.0)


@dataclass(frozen=True)
class Scenario:
    """A resolved configuration with its potential, grid and Dirac parameters."""

    config: ScenarioConfig
    grid: GridSpec
    potential: SlowPotential
    geometry: BarrierGeometry
    dirac: DiracParams
    z0: float
    detect_z: float
    reflect_z: float


def build_scenario(cfg: ScenarioConfig) -> Scenario:
    cfg = cfg.resolved()
    assert cfg.w0 is not None
    grav = gravity_slope(cfg.constants)
    pot = barrier_from_height(cfg.barrier_height_vb, cfg.w0, grav)
    geometry = _resolve_geometry(pot)
    dirac = fit_dirac(cfg.lattice, cfg.n_cut, cfg.fit_halfwidth, strict=False)

    if isinf(geometry.z_max):
        detect_z = pot.z_center + cfg.w0 * (1 + cfg.detect_offset_w0)
    else:
        detect_z = geometry.z_max + cfg.detect_offset_w0 * cfg.w0
    grid = cfg.grid()
    if not grid.contains(detect_z):
        raise InvalidParameterError(
            f"Detection plane z={detect_z:.4g} lies outside [{grid.z_min}, {grid.z_max})"
        )

    scenario = Scenario(
        config=cfg,
        grid=grid,
        potential=pot,
        geometry=geometry,
        dirac=dirac,
        z0=geometry.z_min + cfg.fall_offset,
        detect_z=detect_z,
        reflect_z=pot.z_center,
    )
    _LOGGER.debug(
        "Scenario: v0=%.4g trap=%.4g barrier=%.4g detect=%.4g",
        pot.v0,
        geometry.z_min,
        geometry.z_max,
        detect_z,
    )
    return scenario


def rising_edge(scenario: Scenario) -> tuple[float, float]:
    """z range from the packet start to the barrier top, or the detection plane."""
    z_end = scenario.geometry.z_max
    if isinf(z_end) or not z_end > scenario.z0:
        z_end = scenario.detect_z
    return scenario.z0, z_end


def launch_energy(scenario: Scenario) -> float:
    """Upper-branch energy of the packet centre, potential included."""
    cfg, d = scenario.config, scenario.dirac
    kinetic = sqrt(d.rest_energy**2 + (d.c_eff * cfg.q0) ** 2)
    return kinetic + float(scenario.potential(scenario.z0))


def _zone_edge(scenario: Scenario) -> bool:
    """Whether the semiclassical trajectory up the barrier reaches |q| >= 1."""
    return semiclassical_q_range(
        launch_energy(scenario), scenario.potential, scenario.dirac, rising_edge(scenario)
    ).zone_edge


@dataclass(frozen=True, eq=False)
class PointResult:
    """One engine run: final field, fractions and flags."""

    scenario: Scenario
    wavefield: WaveField
    transmission: TransmissionResult
    zone_edge: bool
    flags: tuple[str, ...]


def run_point(cfg: ScenarioConfig | Scenario) -> PointResult:
    """Build the scenario, evolve the configured engine to total_time and measure."""
    scenario = cfg if isinstance(cfg, Scenario) else build_scenario(cfg)
    config = scenario.config
    assert config.dt is not None and config.total_time is not None
    n_steps = round(config.total_time / config.dt)

    final: SpinorField | ScalarField
    if config.engine == ENGINE_SCHRODINGER:
        p0 = config.q0 + SCHRODINGER_MOMENTUM_SHIFT
        start = init_gaussian(scenario.grid, p0, config.sigma_z, scenario.z0)
        if config.load_band:
            # keep the band that continues the free dispersion at p0
            start = project_band(start, config.lattice, int(abs(p0)), config.n_cut)
        final = evolve_full(
            start, config.lattice, scenario.potential, config.dt, n_steps, config.absorber
        )
    else:
        start = init_packet(
            scenario.grid, config.q0, config.sigma_z, scenario.z0, scenario.dirac
        )
        final = evolve(
            start, scenario.potential, scenario.dirac, config.dt, n_steps, config.absorber
        )

    result = transmission(final, scenario.detect_z, scenario.reflect_z)
    flags: list[str] = []
    zone_edge = False
    try:
        zone_edge = _zone_edge(scenario)
    except KleinSimError as err:
        _LOGGER.warning("Semiclassical range unavailable: %s", err)
        flags.append(f"error:{err.category}")
    if zone_edge:
        flags.append(FLAG_ZONE_EDGE)
    if config.barrier_height_vb == 0:
        flags.append(FLAG_NO_BARRIER)
    if scenario.dirac.fit_residual > FIT_RESIDUAL_MAX:
        flags.append(FLAG_FIT_RESIDUAL)

    _LOGGER.info(
        "%s run at phi=%.4f vb=%.4g: transmitted=%.4f reflected=%.4f",
        config.engine,
        config.lattice.phi,
        config.barrier_height_vb,
        result.transmitted,
        result.reflected,
    )
    return PointResult(scenario, final, result, zone_edge, tuple(flags))


@dataclass(frozen=True)
class SweepRow:
    """One line of a sweep; failed points carry NaN and an `error:` flag."""

    phi: float
    vb: float
    gap: float
    c_eff: float
    compton_um: float
    transmitted: float
    reflected: float
    remaining: float
    zone_edge: bool
    flags: tuple[str, ...] = ()

    @property
    def failed(self) -> bool:
        return any(flag.startswith("error:") for flag in self.flags)


@dataclass(frozen=True)
class SweepResult:
    """Sweep rows sorted by the swept axis ("phi" or "vb")."""

    axis: str
    rows: tuple[SweepRow, ...]

    def values(self) -> FloatArray:
        return np.array([getattr(row, self.axis) for row in self.rows])

    def transmitted(self) -> FloatArray:
        return np.array([row.transmitted for row in self.rows])

    def series(self) -> list[tuple[str, FloatArray, FloatArray]]:
        """(label, axis values, transmitted) per value of the other parameter."""
        other = "vb" if self.axis == "phi" else "phi"
        groups: dict[float, list[SweepRow]] = {}
        for row in self.rows:
            groups.setdefault(getattr(row, other), []).append(row)
        return [
            (
                f"{other}={key:.4g}",
                np.array([getattr(row, self.axis) for row in rows]),
                np.array([row.transmitted for row in rows]),
            )
            for key, rows in sorted(groups.items())
        ]


def _sweep_point(cfg: ScenarioConfig, phi: float, vb: float) -> SweepRow:
    try:
        point = run_point(cfg)
    except KleinSimError as err:
        _LOGGER.warning("Sweep point phi=%.4f vb=%.4g failed: %s", phi, vb, err)
        return SweepRow(phi, vb, nan, nan, nan, nan, nan, nan, False, (f"error:{err.category}",))

    d = point.scenario.dirac
    scale = recoil_scale(cfg.constants)
    compton_um = scale.to_physical(d.compton_wavelength, Quantity.LENGTH) * 1e6
    t = point.transmission
    return SweepRow(
        phi=phi,
        vb=vb,
        gap=d.gap,
        c_eff=d.c_eff,
        compton_um=compton_um,
        transmitted=t.transmitted,
        reflected=t.reflected,
        remaining=t.remaining,
        zone_edge=point.zone_edge,
        flags=point.flags,
    )


def default_phis(cfg: ScenarioConfig) -> FloatArray:
    """Uniform phases from 0 to 2*pi inclusive, so pi is sampled for odd counts."""
    return np.linspace(0.0, 2 * np.pi, cfg.phi_points)


def default_vbs(cfg: ScenarioConfig) -> FloatArray:
    return np.linspace(0.0, cfg.vb_max, cfg.vb_points)


def phase_sweep(cfg: ScenarioConfig, phis: list[float] | FloatArray | None = None) -> SweepResult:
    """Transmission versus lattice phase at the configured barrier height."""
    cfg = cfg.resolved()
    values = default_phis(cfg) if phis is None else phis
    vb = cfg.barrier_height_vb
    jobs = [
        SweepJob((float(phi), vb), lambda phi=float(phi): _sweep_point(cfg.with_phi(phi), phi, vb))
        for phi in values
    ]
    rows = SweepCoordinator("phase sweep", cfg.workers).run(jobs)
    return SweepResult("phi", tuple(rows))


def barrier_sweep(
    cfg: ScenarioConfig,
    vbs: list[float] | FloatArray | None = None,
    phi_values: tuple[float, ...] = (0.0, np.pi),
) -> SweepResult:
    """Transmission versus barrier height for each phase in `phi_values`."""
    cfg = cfg.resolved()
    values = default_vbs(cfg) if vbs is None else vbs
    jobs = [
        SweepJob(
            (float(vb), float(phi)),
            lambda phi=float(phi), vb=float(vb): _sweep_point(
                cfg.with_phi(phi).with_barrier(vb), phi, vb
            ),
        )
        for phi in phi_values
        for vb in values
    ]
    rows = SweepCoordinator("barrier sweep", cfg.workers).run(jobs)
    return SweepResult("vb", tuple(rows))


def wkb_estimate(width_z: float) -> float:
    """Non-relativistic tunnelling probability exp(-2 z) through width z (1/k).

    Assumes the atom sits one recoil energy below the barrier top, so
    |p| = sqrt(2 m E_r) = hbar k under the barrier.
    """
    if width_z < 0:
        raise InvalidParameterError(f"Barrier width must be non-negative, got {width_z}")
    return exp(-2 * width_z)


@dataclass(frozen=True, eq=False)
class ProfileResult:
    point: PointResult
    csv_path: Path
    snapshot_path: Path


def density_profile_run(cfg: ScenarioConfig, out_dir: Path) -> ProfileResult:
    """Evolve to total_time and write the density profile CSV and a snapshot."""
    point = run_point(cfg)
    csv_path = out_dir / PROFILE_CSV
    snapshot_path = out_dir / SNAPSHOT_FILE
    pot = point.scenario.potential
    final = point.wavefield
    if isinstance(final, SpinorField):
        write_dirac_density_csv(final, pot, csv_path)
        write_dirac_snapshot(final, snapshot_path)
    else:
        assert isinstance(final, ScalarField)
        write_schrodinger_density_csv(final, pot, csv_path)
        write_schrodinger_snapshot(final, snapshot_path)
    return ProfileResult(point, csv_path, snapshot_path)


@dataclass(frozen=True)
class AffineFit:
    """reference ~ amplitude * model + offset."""

    amplitude: float
    offset: float
    rms: float


def fit_affine(model: FloatArray, reference: FloatArray) -> AffineFit:
    """Least-squares amplitude and offset mapping `model` onto `reference`."""
    model = np.asarray(model, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if model.shape != reference.shape or model.ndim != 1:
        raise InvalidParameterError("model and reference must be 1-d arrays of equal length")
    if model.size < 2:
        raise InvalidParameterError("An affine fit needs at least two points")
    if not (np.all(np.isfinite(model)) and np.all(np.isfinite(reference))):
        raise InvalidParameterError("model and reference must be finite")
    design = np.column_stack([model, np.ones_like(model)])
    (amplitude, offset), *_ = np.linalg.lstsq(design, reference, rcond=None)
    rms = float(np.sqrt(np.mean((design @ [amplitude, offset] - reference) ** 2)))
    return AffineFit(float(amplitude), float(offset), rms)


@dataclass(frozen=True)
class EngineComparison:
    """Transmitted fractions of both engines over the same phases."""

    phis: FloatArray
    dirac: FloatArray
    schrodinger: FloatArray
    fit: AffineFit | None

    @property
    def max_deviation(self) -> float:
        return float(np.nanmax(np.abs(self.dirac - self.schrodinger)))


def _transmitted(cfg: ScenarioConfig) -> float:
    try:
        return run_point(cfg).transmission.transmitted
    except KleinSimError as err:
        _LOGGER.warning(
            "%s run at phi=%.4f failed: %s", cfg.engine, cfg.lattice.phi, err
        )
        return nan


def compare_engines(
    cfg: ScenarioConfig, phis: list[float] | FloatArray | None = None
) -> EngineComparison:
    """Run both engines with the same numerics and fit Schrodinger ~ a * Dirac + b."""
    cfg = cfg.resolved()
    values = sorted(float(phi) for phi in (default_phis(cfg) if phis is None else phis))
    jobs = [
        SweepJob(
            (phi, float(index)),
            lambda phi=phi, engine=engine: _transmitted(
                replace(cfg.with_phi(phi), engine=engine)
            ),
        )
        for phi in values
        for index, engine in enumerate(ENGINES)
    ]
    results = SweepCoordinator("engine comparison", cfg.workers).run(jobs)
    # rows per phase, columns in ENGINES order
    dirac, schrodinger = np.array(results).reshape(len(values), len(ENGINES)).T

    ok = np.isfinite(dirac) & np.isfinite(schrodinger)
    fit = fit_affine(dirac[ok], schrodinger[ok]) if np.count_nonzero(ok) >= 2 else None
    comparison = EngineComparison(np.array(values), dirac, schrodinger, fit)
    _LOGGER.info(
        "Engine comparison over %d phases: max |T_dirac - T_schrodinger| = %.4f",
        len(values),
        comparison.max_deviation if ok.any() else nan,
    )
    return comparison


def write_sweep_csv(result: SweepResult, path: Path, cfg: ScenarioConfig) -> None:
    """Write the sweep with the resolved configuration as a `# key=value` header."""
    with path.open("w", newline="", encoding="utf-8") as handle:
        for line in cfg.echo():
            handle.write(f"# {line}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for row in result.rows:
            writer.writerow(
                [
                    *(
                        _format(float(value)) if isfinite(value) else str(value)
                        for value in (
                            row.phi,
                            row.vb,
                            row.gap,
                            row.c_eff,
                            row.compton_um,
                            row.transmitted,
                            row.reflected,
                            row.remaining,
                        )
                    ),
                    int(row.zone_edge),
                ]
            )
    _LOGGER.info("Wrote %s sweep with %d rows to %s", result.axis, len(result.rows), path)


def write_comparison_csv(result: EngineComparison, path: Path, cfg: ScenarioConfig) -> None:
    """Per-phase transmissions of both engines; the affine fit goes in the header."""
    with path.open("w", newline="", encoding="utf-8") as handle:
        for line in cfg.echo():
            handle.write(f"# {line}\n")
        if result.fit is not None:
            fit = result.fit
            handle.write(
                f"# affine amplitude={_format(fit.amplitude)} "
                f"offset={_format(fit.offset)} rms={_format(fit.rms)}\n"
            )
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(COMPARISON_HEADER)
        for phi, dirac, schrodinger in zip(
            result.phis, result.dirac, result.schrodinger, strict=True
        ):
            writer.writerow(
                _format(float(value)) if isfinite(value) else str(value)
                for value in (phi, dirac, schrodinger, schrodinger - dirac)
            )
    _LOGGER.info("Wrote engine comparison with %d rows to %s", len(result.phis), path)
