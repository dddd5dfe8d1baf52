"""Tests for the scenario file parser."""

from __future__ import annotations

from math import pi
from pathlib import Path

import pytest

from kleinsim.config import parse_config
from kleinsim.exceptions import ConfigError

SCENARIO = """
# closed gap, shallow trap
v1_Er = 5
v2_Er = 1.6
phi_rad = 3.141592653589793   # pi
barrier_height_Er = 4
w0_um = 23
total_time_ms = 5
engine = Dirac
absorber = off
load_band = off
"""


def test_parse_scenario_file() -> None:
    cfg = parse_config(SCENARIO)
    assert cfg.lattice.phi == pytest.approx(pi)
    assert cfg.barrier_height_vb == 4.0
    assert cfg.w0 == pytest.approx(184.56, rel=1e-4)
    assert cfg.total_time == pytest.approx(117.6, rel=2e-3)
    assert cfg.engine == "dirac"
    assert cfg.absorber is False
    assert cfg.load_band is False
    assert cfg.dt is None


def test_empty_file_gives_defaults() -> None:
    cfg = parse_config("").resolved()
    assert cfg.lattice.v1 == 5.0
    assert cfg.q0 == 0.9
    assert cfg.sigma_z == 10.0


def test_overrides_win() -> None:
    cfg = parse_config(SCENARIO, ["barrier_height_Er=7", "w0=100"])
    assert cfg.barrier_height_vb == 7.0
    # a base-unit override replaces the micrometre entry of the file
    assert cfg.w0 == 100.0


def test_units_follow_the_configured_wavelength() -> None:
    short = parse_config("wavelength_nm = 391.5\nw0_um = 23")
    assert short.w0 == pytest.approx(2 * 184.56, rel=1e-4)


@pytest.mark.parametrize(
    ("text", "key", "line"),
    [
        ("v1_Er = 5\nbogus = 1", "bogus", 2),
        ("v1_Er = 5\nv1_Er = 6", "v1_Er", 2),
        ("\n\nq0 = 1.5", "q0", 3),
        ("n_points = 1000", "n_points", 1),
        ("engine = tight-binding", "engine", 1),
        ("absorber = maybe", "absorber", 1),
        ("w0 = 100\nw0_um = 23", "w0_um", 2),
        ("dt = -1", "dt", 1),
    ],
)
def test_config_errors_name_key_and_line(text: str, key: str, line: int) -> None:
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.key == key
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}, key '{key}': ")


def test_missing_equals_sign() -> None:
    with pytest.raises(ConfigError, match="line 1: expected 'key = value'"):
        parse_config("v1_Er 5")


def test_override_errors_have_no_line() -> None:
    with pytest.raises(ConfigError) as err:
        parse_config("", ["bogus=1"])
    assert err.value.key == "bogus"
    assert err.value.line is None


def test_shipped_scenario_matches_defaults() -> None:
    text = (Path(__file__).parents[1] / "config" / "scenario.conf").read_text(encoding="utf-8")
    shipped = parse_config(text).resolved()
    defaults = parse_config("").resolved()
    assert shipped.lattice.phi == pytest.approx(defaults.lattice.phi)
    assert shipped.w0 == pytest.approx(defaults.w0, rel=1e-9)
    assert shipped.total_time == pytest.approx(defaults.total_time, rel=1e-9)
    assert shipped.constants.atom_mass == pytest.approx(defaults.constants.atom_mass, rel=1e-8)
    assert shipped.absorber is True
    assert shipped.load_band is True
