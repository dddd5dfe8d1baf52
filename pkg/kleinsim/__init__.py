"""The kleinsim simulator: Klein tunnelling of cold atoms in a bichromatic lattice."""

from __future__ import annotations

from .bandstructure import DiracParams, LatticeParams, excited_gap, fit_dirac
from .config import parse_config
from .experiments import (
    ScenarioConfig,
    barrier_sweep,
    build_scenario,
    phase_sweep,
    run_point,
)

__all__ = [
    "DiracParams",
    "LatticeParams",
    "ScenarioConfig",
    "barrier_sweep",
    "build_scenario",
    "excited_gap",
    "fit_dirac",
    "parse_config",
    "phase_sweep",
    "run_point",
]
