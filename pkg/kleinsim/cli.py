"""Command line front end for kleinsim."""

from __future__ import annotations

import argparse
import json
import logging
from collections.abc import Callable, Sequence
from dataclasses import replace
from pathlib import Path

import numpy as np

from .bandstructure import band_scan, write_band_csv
from .config import parse_config
from .const import (
    DIAGNOSTICS_FILE,
    DOMAIN,
    ENGINE_DIRAC,
    ENGINE_SCHRODINGER,
    EXIT_OK,
    RESOLVED_CONFIG_FILE,
)
from .diagnostics import get_scenario_diagnostics
from .dirac import SpinorField, mean_energy
from .error_handlers import handle_run_error
from .experiments import (
    ScenarioConfig,
    SweepResult,
    barrier_sweep,
    compare_engines,
    density_profile_run,
    phase_sweep,
    write_comparison_csv,
    write_sweep_csv,
)
from .svg import emit_svg, flag_spans

_LOGGER = logging.getLogger(__name__)

BAND_Q_POINTS = 201
BAND_COUNT = 5
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

COMMANDS = (
    "bands",
    "dirac-run",
    "schrodinger-run",
    "phase-sweep",
    "barrier-sweep",
    "profile",
    "compare",
)

type Command = Callable[[ScenarioConfig, Path], None]


def _write_json(path: Path, data: object) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _LOGGER.info("Wrote %s", path)


def run_bands(cfg: ScenarioConfig, out: Path) -> None:
    solution = band_scan(
        cfg.lattice, np.linspace(-1.0, 1.0, BAND_Q_POINTS), BAND_COUNT, cfg.n_cut
    )
    write_band_csv(solution, out / "bands.csv")
    emit_svg(
        [(solution.q_grid, solution.energies[:, band]) for band in range(BAND_COUNT)],
        [f"E{band}" for band in range(BAND_COUNT)],
        out / "bands.svg",
        title=f"Bloch bands, phi={cfg.lattice.phi:.4g} rad",
        x_label="q (hbar k)",
        y_label="E (E_r)",
    )


def run_engine(cfg: ScenarioConfig, out: Path) -> None:
    _write_json(out / DIAGNOSTICS_FILE, get_scenario_diagnostics(cfg))
    profile = density_profile_run(cfg, out)
    point = profile.point
    t = point.transmission
    final, scenario = point.wavefield, point.scenario
    energy = (
        mean_energy(final, scenario.potential, scenario.dirac)
        if isinstance(final, SpinorField)
        else None
    )
    _write_json(
        out / "result.json",
        {
            "engine": cfg.engine,
            "time": t.time,
            "detect_z": t.detect_z,
            "transmitted": t.transmitted,
            "reflected": t.reflected,
            "remaining": t.remaining,
            "zone_edge": point.zone_edge,
            "flags": list(point.flags),
            "mean_energy": energy,
        },
    )


def run_profile(cfg: ScenarioConfig, out: Path) -> None:
    profile = density_profile_run(cfg, out)
    point = profile.point
    grid, pot = point.scenario.grid, point.scenario.potential
    density = point.wavefield.density()
    potential = pot(grid.z)
    # potential rescaled onto the density axis
    span = float(np.ptp(potential)) or 1.0
    scaled = (potential - potential.min()) / span * float(density.max())
    emit_svg(
        [(grid.z, density), (grid.z, scaled)],
        ["density", "V_slow (scaled)"],
        out / "profile.svg",
        title=f"Density at t={point.wavefield.time:.4g}",
        x_label="z (1/k)",
        y_label="|psi|^2",
    )


def _plot_sweep(result: SweepResult, path: Path, x_label: str, shaded: bool) -> None:
    series, labels, spans = [], [], []
    for label, x, y in result.series():
        ok = np.isfinite(y)
        if ok.any():
            series.append((x[ok], y[ok]))
            labels.append(label)
    if shaded:
        rows = [row for row in result.rows if np.isclose(row.phi, np.pi)] or list(result.rows)
        spans = flag_spans([row.vb for row in rows], [row.zone_edge for row in rows])
    emit_svg(
        series,
        labels,
        path,
        title="Transmitted fraction",
        x_label=x_label,
        y_label="transmitted",
        shaded=spans,
    )


def run_phase_sweep(cfg: ScenarioConfig, out: Path) -> None:
    result = phase_sweep(cfg)
    write_sweep_csv(result, out / "phase_sweep.csv", cfg)
    _plot_sweep(result, out / "phase_sweep.svg", "phi (rad)", shaded=False)


def run_barrier_sweep(cfg: ScenarioConfig, out: Path) -> None:
    result = barrier_sweep(cfg)
    write_sweep_csv(result, out / "barrier_sweep.csv", cfg)
    _plot_sweep(result, out / "barrier_sweep.svg", "V_b (E_r)", shaded=True)


def run_compare(cfg: ScenarioConfig, out: Path) -> None:
    result = compare_engines(cfg)
    write_comparison_csv(result, out / "comparison.csv", cfg)
    series = []
    for values in (result.dirac, result.schrodinger):
        ok = np.isfinite(values)
        if ok.any():
            series.append((result.phis[ok], values[ok]))
    if len(series) < 2:
        _LOGGER.warning("Not enough finite points to plot the engine comparison")
        return
    emit_svg(
        series,
        ["Dirac", "Schrodinger"],
        out / "comparison.svg",
        title="Transmitted fraction by engine",
        x_label="phi (rad)",
        y_label="transmitted",
    )


HANDLERS: dict[str, Command] = {
    "bands": run_bands,
    "dirac-run": run_engine,
    "schrodinger-run": run_engine,
    "phase-sweep": run_phase_sweep,
    "barrier-sweep": run_barrier_sweep,
    "profile": run_profile,
    "compare": run_compare,
}

# compare runs both engines on the finer Schrodinger numerics
ENGINE_OVERRIDES = {
    "dirac-run": ENGINE_DIRAC,
    "schrodinger-run": ENGINE_SCHRODINGER,
    "compare": ENGINE_SCHRODINGER,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=DOMAIN, description="Klein tunnelling of cold atoms in a bichromatic lattice."
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="scenario file (key = value lines)")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a configuration value; repeatable",
    )
    parser.add_argument("--debug", action="store_true", help="enable debug logging")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
    if args.debug:
        logging.getLogger(DOMAIN).setLevel(logging.DEBUG)

    command: str = args.command
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text, args.set)
        if command in ENGINE_OVERRIDES:
            cfg = replace(cfg, engine=ENGINE_OVERRIDES[command])
        cfg = cfg.resolved()

        out: Path = args.out
        out.mkdir(parents=True, exist_ok=True)
        (out / RESOLVED_CONFIG_FILE).write_text(
            "\n".join(cfg.echo()) + "\n", encoding="utf-8"
        )
        _LOGGER.info("Running %s into %s", command, out)
        HANDLERS[command](cfg, out)
    except Exception as err:  # noqa: BLE001
        return handle_run_error(command, err)
    return EXIT_OK
