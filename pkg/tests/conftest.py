"""Shared fixtures for kleinsim tests."""

from __future__ import annotations

from math import pi

import pytest

from kleinsim.bandstructure import DiracParams, LatticeParams
from kleinsim.experiments import ScenarioConfig
from kleinsim.grid import GridSpec


@pytest.fixture
def dirac_lattice() -> LatticeParams:
    """The lattice of the default scenario at the gap-closing phase."""
    return LatticeParams(v1=5.0, v2=1.6, phi=pi)


@pytest.fixture
def gapped() -> DiracParams:
    return DiracParams(gap=1.0, c_eff=4.0)


@pytest.fixture
def massless() -> DiracParams:
    return DiracParams(gap=0.0, c_eff=4.0)


@pytest.fixture
def small_grid() -> GridSpec:
    """dz = 0.25, resolves packets up to sigma_z of about 2.5."""
    return GridSpec(-128.0, 128.0, 1024)


@pytest.fixture
def reduced_config() -> ScenarioConfig:
    """A narrower trap on a coarse grid, cheap enough to evolve in tests."""
    return ScenarioConfig(
        w0=80.0,
        sigma_z=5.0,
        total_time=45.0,
        dt=0.0025,
        n_points=2048,
        z_min=-240.0,
        z_max=360.0,
    )


@pytest.fixture
def validity_config() -> ScenarioConfig:
    """Slow launch over a low barrier at the closed gap.

    The packet stays well inside the linear part of the crossing bands, and the
    right absorber starts before the lattice packet would reach the zone edge.
    """
    return ScenarioConfig(
        w0=80.0,
        q0=0.3,
        sigma_z=6.0,
        barrier_height_vb=1.5,
        total_time=60.0,
        dt=0.001,
        n_points=8192,
        z_min=-500.0,
        z_max=200.0,
    )
