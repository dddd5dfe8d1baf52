"""Tests for scenarios, sweeps and analytic estimates."""

from __future__ import annotations

import logging
from dataclasses import replace
from math import exp, inf, log10, pi
from pathlib import Path

import numpy as np
import pytest

from kleinsim.bandstructure import DiracParams
from kleinsim.config import parse_config
from kleinsim.const import ENGINE_SCHRODINGER
from kleinsim.dirac import (
    SlowPotential,
    evolve,
    init_packet,
    landau_zener_transmission,
    semiclassical_q_range,
)
from kleinsim.exceptions import BarrierError, InvalidParameterError
from kleinsim.experiments import (
    FLAG_NO_BARRIER,
    FLAG_ZONE_EDGE,
    ScenarioConfig,
    SweepResult,
    SweepRow,
    barrier_from_height,
    barrier_height,
    barrier_sweep,
    barrier_threshold,
    build_scenario,
    compare_engines,
    density_profile_run,
    fit_affine,
    launch_energy,
    phase_sweep,
    rising_edge,
    run_point,
    wkb_estimate,
    write_comparison_csv,
    write_sweep_csv,
)
from kleinsim.grid import GridSpec
from kleinsim.units import PhysicalConstants, Quantity, recoil_scale

W0 = 184.56
GRAV = 0.0711


def test_barrier_without_gravity_is_trap_depth() -> None:
    pot = barrier_from_height(3.0, 50.0, 0.0)
    assert pot.v0 == 3.0
    assert barrier_height(pot) == 3.0


def test_barrier_from_height_is_inverted_by_barrier_height() -> None:
    pot = barrier_from_height(5.0, W0, GRAV)
    assert pot.v0 > barrier_threshold(W0, GRAV)
    assert barrier_height(pot) == pytest.approx(5.0, abs=1e-8)


def test_zero_barrier_sits_at_threshold(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.WARNING):
        pot = barrier_from_height(0.0, W0, GRAV)
    assert pot.v0 == pytest.approx(GRAV * W0 * exp(0.5) / 2)
    assert barrier_height(pot) == pytest.approx(0.0, abs=1e-6)
    assert "Zero barrier height" in caplog.text


def test_barrier_errors() -> None:
    with pytest.raises(BarrierError):
        barrier_from_height(5.0, W0, 100.0)
    with pytest.raises(InvalidParameterError):
        barrier_from_height(-1.0, W0, GRAV)


def test_no_barrier_below_threshold() -> None:
    assert barrier_height(SlowPotential(v0=1.0, w0=W0, grav=GRAV)) == 0.0


def test_wkb_estimate() -> None:
    scale = recoil_scale(PhysicalConstants())
    waist = scale.to_dimensionless(24.5e-6, Quantity.LENGTH)
    assert log10(wkb_estimate(waist)) == pytest.approx(-170.8, abs=0.1)
    assert wkb_estimate(0.0) == 1.0
    assert wkb_estimate(20.0) == pytest.approx(wkb_estimate(10.0) ** 2)
    with pytest.raises(InvalidParameterError):
        wkb_estimate(-1.0)


def test_resolved_defaults() -> None:
    cfg = ScenarioConfig().resolved()
    assert cfg.is_resolved
    assert cfg.w0 == pytest.approx(W0, rel=1e-4)
    assert cfg.total_time == pytest.approx(117.6, rel=2e-3)
    assert cfg.dt == 5e-4
    assert cfg.n_points == 2**14
    assert cfg.resolved() is cfg

    lattice = ScenarioConfig(engine=ENGINE_SCHRODINGER).resolved()
    assert lattice.dt == 5e-4
    assert lattice.n_points == 2**16


def test_invalid_config_values() -> None:
    with pytest.raises(InvalidParameterError):
        ScenarioConfig(q0=1.5)
    with pytest.raises(InvalidParameterError):
        ScenarioConfig(engine="tight-binding")
    with pytest.raises(InvalidParameterError):
        ScenarioConfig(total_time=-1.0)


def test_echo_reparses_to_the_same_echo(reduced_config: ScenarioConfig) -> None:
    lines = reduced_config.echo()
    assert lines[0].startswith("v1_Er=")
    assert "engine=dirac" in lines
    assert parse_config("\n".join(lines)).echo() == lines


def test_scenario_geometry(reduced_config: ScenarioConfig) -> None:
    scenario = build_scenario(reduced_config)
    geometry = scenario.geometry
    assert geometry.height == pytest.approx(5.0, abs=1e-8)
    assert scenario.z0 == geometry.z_min
    assert scenario.detect_z == pytest.approx(geometry.z_max + 0.5 * 80.0)
    assert scenario.reflect_z == 0.0
    assert rising_edge(scenario) == (geometry.z_min, geometry.z_max)
    assert scenario.dirac.gap < 0.05


def test_scenario_without_gravity(reduced_config: ScenarioConfig) -> None:
    cfg = replace(reduced_config, constants=PhysicalConstants(gravity=0.0))
    scenario = build_scenario(cfg)
    assert scenario.potential.v0 == 5.0
    assert scenario.geometry.z_max == inf
    assert scenario.detect_z == pytest.approx(80.0 * 1.5)
    assert rising_edge(scenario) == (0.0, scenario.detect_z)


def test_detection_plane_outside_domain(reduced_config: ScenarioConfig) -> None:
    with pytest.raises(InvalidParameterError):
        build_scenario(replace(reduced_config, z_max=100.0))


def test_klein_contrast_between_phases(reduced_config: ScenarioConfig) -> None:
    closed = run_point(reduced_config)
    opened = run_point(reduced_config.with_phi(0.0))
    assert closed.transmission.transmitted > 0.9
    assert opened.transmission.transmitted < 0.1
    assert FLAG_ZONE_EDGE not in closed.flags


def test_without_barrier_packet_falls_through(reduced_config: ScenarioConfig) -> None:
    point = run_point(reduced_config.with_barrier(0.0))
    assert point.transmission.transmitted > 0.95
    assert FLAG_NO_BARRIER in point.flags


@pytest.mark.parametrize(("vb", "expected"), [(6.0, False), (9.5, True)])
def test_zone_edge_boundary(reduced_config: ScenarioConfig, vb: float, expected: bool) -> None:
    # massless branch: q at the barrier top is q0 - vb / c_eff
    scenario = build_scenario(reduced_config.with_barrier(vb))
    q_range = semiclassical_q_range(
        launch_energy(scenario), scenario.potential, scenario.dirac, rising_edge(scenario)
    )
    assert q_range.zone_edge is expected
    assert q_range.q_min == pytest.approx(0.9 - vb / scenario.dirac.c_eff, abs=0.05)


def test_phase_sweep_is_symmetric(reduced_config: ScenarioConfig) -> None:
    cfg = replace(reduced_config, total_time=5.0, workers=2)
    result = phase_sweep(cfg, [2 * pi - 2.5, 2.5])
    assert result.axis == "phi"
    np.testing.assert_allclose(result.values(), [2.5, 2 * pi - 2.5])
    first, second = result.rows
    assert first.gap == pytest.approx(second.gap, abs=1e-8)
    assert first.transmitted == pytest.approx(second.transmitted, abs=1e-6)
    assert not first.failed


def test_barrier_sweep_rows_and_failures(reduced_config: ScenarioConfig) -> None:
    cfg = replace(reduced_config, total_time=1.0, z_min=-400.0, z_max=130.0)
    result = barrier_sweep(cfg, [1.0, 40.0], phi_values=(pi,))
    assert [row.vb for row in result.rows] == [1.0, 40.0]
    ok, failed = result.rows
    assert not ok.failed
    # the 40 E_r barrier puts the detection plane outside the domain
    assert failed.failed
    assert failed.flags == ("error:invalid_parameter",)
    assert np.isnan(failed.transmitted)


def test_sweep_series_groups_by_phase() -> None:
    rows = tuple(
        SweepRow(phi, vb, 1.0, 4.0, 5.0, vb / 10, 0.0, 1 - vb / 10, False)
        for vb in (0.0, 5.0)
        for phi in (0.0, pi)
    )
    series = SweepResult("vb", rows).series()
    assert [label for label, _, _ in series] == ["phi=0", "phi=3.142"]
    np.testing.assert_allclose(series[1][1], [0.0, 5.0])


def test_sweep_csv_is_deterministic(tmp_path: Path, reduced_config: ScenarioConfig) -> None:
    rows = (
        SweepRow(pi, 0.0, 0.01, 4.0, inf, 0.99, 0.0, 0.01, True, (FLAG_ZONE_EDGE,)),
        SweepRow(pi, 5.0, *([float("nan")] * 6), False, ("error:norm_drift",)),
    )
    result = SweepResult("vb", rows)
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    write_sweep_csv(result, first, reduced_config)
    write_sweep_csv(result, second, reduced_config)
    assert first.read_bytes() == second.read_bytes()

    lines = first.read_text(encoding="utf-8").splitlines()
    header = len(reduced_config.echo())
    assert all(line.startswith("# ") for line in lines[:header])
    assert lines[header] == (
        "phi,vb,gap,c_eff,compton_um,transmitted,reflected,remaining,zone_edge_flag"
    )
    assert lines[header + 1] == "3.14159265359,0,0.01,4,inf,0.99,0,0.01,1"
    assert lines[header + 2] == "3.14159265359,5,nan,nan,nan,nan,nan,nan,0"


def test_fit_affine() -> None:
    model = np.linspace(0.0, 1.0, 11)
    fit = fit_affine(model, 0.8 * model + 0.05)
    assert fit.amplitude == pytest.approx(0.8)
    assert fit.offset == pytest.approx(0.05)
    assert fit.rms == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InvalidParameterError):
        fit_affine(model, model[:-1])


def test_compare_engines_pairs_phases(tmp_path: Path, reduced_config: ScenarioConfig) -> None:
    cfg = replace(reduced_config, total_time=1.0)
    result = compare_engines(cfg, [pi, 0.0])
    np.testing.assert_allclose(result.phis, [0.0, pi])
    assert result.dirac.shape == result.schrodinger.shape == (2,)
    assert np.all(result.dirac < 0.05)
    assert np.all(result.schrodinger < 0.05)
    assert result.fit is not None
    assert result.max_deviation < 0.05

    path = tmp_path / "comparison.csv"
    write_comparison_csv(result, path, cfg)
    lines = path.read_text(encoding="utf-8").splitlines()
    header = len(cfg.echo())
    assert lines[header].startswith("# affine amplitude=")
    assert lines[header + 1] == "phi,transmitted_dirac,transmitted_schrodinger,difference"
    assert lines[header + 2].startswith("0,")
    assert lines[header + 3].startswith("3.14159265359,")


def test_profile_at_start(tmp_path: Path, reduced_config: ScenarioConfig) -> None:
    profile = density_profile_run(replace(reduced_config, total_time=0.0), tmp_path)
    assert profile.csv_path.exists()
    assert profile.snapshot_path.stat().st_size > 4096
    assert profile.point.wavefield.time == 0.0
    assert profile.point.transmission.transmitted < 1e-6


@pytest.mark.slow
def test_default_scenario_contrast() -> None:
    closed = run_point(ScenarioConfig())
    opened = run_point(ScenarioConfig().with_phi(0.0))
    assert closed.transmission.transmitted > 0.9
    assert opened.transmission.transmitted < 0.1


@pytest.mark.slow
def test_sudden_loading_keeps_the_contrast(reduced_config: ScenarioConfig) -> None:
    cfg = replace(
        reduced_config, engine=ENGINE_SCHRODINGER, dt=0.001, n_points=8192, load_band=False
    )
    closed = run_point(cfg)
    opened = run_point(cfg.with_phi(0.0))
    assert closed.transmission.transmitted > opened.transmission.transmitted + 0.2


@pytest.mark.slow
def test_engines_agree_where_the_dirac_model_holds(validity_config: ScenarioConfig) -> None:
    assert build_scenario(validity_config).dirac.rest_energy <= 0.2
    result = compare_engines(validity_config, [pi])
    assert result.dirac[0] > 0.9
    assert abs(result.dirac[0] - result.schrodinger[0]) < 0.05


@pytest.mark.slow
def test_single_passage_matches_landau_zener(gapped: DiracParams) -> None:
    force = 0.1
    grid = GridSpec(-256.0, 256.0, 2048)
    q0, z0 = -0.5, 0.0
    f = init_packet(grid, q0, 5.0, z0, gapped)
    out = evolve(f, SlowPotential(0.0, 1.0, force), gapped, 0.002, round(1.5 / force / 0.002))

    # q reaches zero here; the diabatic part keeps climbing, the rest turns back
    rest = gapped.rest_energy
    z_cross = z0 - (np.hypot(rest, gapped.c_eff * q0) - rest) / force
    rho = out.density()
    climbed = grid.integrate(np.where(grid.z < z_cross, rho, 0.0)) / out.total_norm
    expected = landau_zener_transmission(gapped, force)
    assert expected / 3 <= climbed <= 3 * expected


@pytest.mark.slow
def test_transmission_does_not_depend_on_barrier_height(
    reduced_config: ScenarioConfig,
) -> None:
    result = barrier_sweep(replace(reduced_config, workers=4), [2.0, 3.5, 5.0, 7.0])
    closed = [row.transmitted for row in result.rows if row.phi == pi]
    opened = {row.vb: row.transmitted for row in result.rows if row.phi == 0.0}
    assert min(closed) > 0.85
    assert np.ptp(closed) < 0.15
    assert opened[5.0] < 0.2
    assert opened[7.0] < 0.2


@pytest.mark.slow
def test_transmission_window_is_narrow_around_pi(reduced_config: ScenarioConfig) -> None:
    result = phase_sweep(replace(reduced_config, workers=4), np.linspace(0.0, 2 * pi, 21))
    window = np.array([row.phi for row in result.rows if row.transmitted > 0.5])
    assert window.size > 0
    assert np.ptp(window) < 0.4 * pi
    assert window.mean() == pytest.approx(pi, abs=0.1)


@pytest.mark.slow
@pytest.mark.parametrize("phi", [2.9, pi])
def test_halving_dt_leaves_transmission_unchanged(
    reduced_config: ScenarioConfig, phi: float
) -> None:
    cfg = reduced_config.with_phi(phi)
    coarse = run_point(cfg).transmission.transmitted
    fine = run_point(replace(cfg, dt=0.00125)).transmission.transmitted
    assert fine == pytest.approx(coarse, abs=1e-3)
