"""Diagnostics support for kleinsim scenarios."""

from __future__ import annotations

import logging
from typing import Any

from .bandstructure import fit_dirac
from .dirac import double_landau_zener, landau_zener_transmission, semiclassical_q_range
from .exceptions import KleinSimError
from .experiments import (
    ScenarioConfig,
    build_scenario,
    launch_energy,
    rising_edge,
    wkb_estimate,
)
from .units import Quantity, c_eff_physical, gravity_slope, recoil_scale

_LOGGER = logging.getLogger(__name__)


def get_scenario_diagnostics(cfg: ScenarioConfig) -> dict[str, Any]:
    """Return analytic estimates and resolved geometry for a scenario.

    Failures are reported per section under an "error" key instead of raised.
    """
    cfg = cfg.resolved()
    scale = recoil_scale(cfg.constants)
    result: dict[str, Any] = {
        "units": {
            "k_per_m": scale.k,
            "E_r_J": scale.E_r,
            "length_unit_m": scale.length_unit,
            "time_unit_s": scale.time_unit,
            "gravity_slope": gravity_slope(cfg.constants),
        },
        "lattice": {
            "v1": cfg.lattice.v1,
            "v2": cfg.lattice.v2,
            "phi": cfg.lattice.phi,
        },
    }

    try:
        d = fit_dirac(cfg.lattice, cfg.n_cut, cfg.fit_halfwidth, strict=False)
        result["dirac"] = {
            "gap": d.gap,
            "crossing_q": d.crossing_q,
            "crossing_energy": d.crossing_energy,
            "c_eff": d.c_eff,
            "c_eff_m_s": scale.to_physical(d.c_eff, Quantity.VELOCITY),
            "c_eff_free_m_s": c_eff_physical(cfg.constants).si,
            "compton_um": scale.to_physical(d.compton_wavelength, Quantity.LENGTH) * 1e6,
            "fit_residual": d.fit_residual,
            "curvature": d.curvature,
        }
    except KleinSimError as err:
        _LOGGER.error("Error fitting Dirac parameters: %s", err)
        result["dirac"] = {"error": f"{err.category}: {err}"}
        return result

    try:
        scenario = build_scenario(cfg)
    except KleinSimError as err:
        _LOGGER.error("Error resolving scenario: %s", err)
        result["barrier"] = {"error": f"{err.category}: {err}"}
        return result

    pot, geometry = scenario.potential, scenario.geometry
    assert cfg.w0 is not None
    result["barrier"] = {
        "v0": pot.v0,
        "height": geometry.height,
        "trap_z": geometry.z_min,
        "barrier_z": geometry.z_max,
        "detect_z": scenario.detect_z,
        "packet_z": scenario.z0,
        "wkb_waist": wkb_estimate(cfg.w0),
    }

    # steepest point of the rising edge
    force = float(pot.slope(pot.z_center + pot.w0 / 2))
    try:
        result["landau_zener"] = {
            "force": force,
            "single": landau_zener_transmission(d, force),
            "double": double_landau_zener(d, force),
        }
    except KleinSimError as err:
        result["landau_zener"] = {"error": f"{err.category}: {err}"}

    energy = launch_energy(scenario)
    try:
        q_range = semiclassical_q_range(energy, pot, d, rising_edge(scenario))
        result["semiclassical"] = {
            "energy": energy,
            "q_min": q_range.q_min,
            "q_max": q_range.q_max,
            "zone_edge": q_range.zone_edge,
        }
    except KleinSimError as err:
        result["semiclassical"] = {"error": f"{err.category}: {err}"}

    return result
