"""Parse flat `key = value` scenario files into a ScenarioConfig."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import replace
from typing import Any

import voluptuous as vol

from .bandstructure import LatticeParams
from .const import (
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
    CONF_WORKERS_MAX,
    CONF_Z_MAX,
    CONF_Z_MIN,
    ENGINES,
    MIN_GRID_POINTS,
    SUFFIX_MS,
    SUFFIX_UM,
)
from .exceptions import ConfigError, InvalidParameterError
from .experiments import ScenarioConfig
from .units import PhysicalConstants, Quantity, recoil_scale

_LOGGER = logging.getLogger(__name__)

# base key -> (suffixed key, quantity, SI factor of one suffix unit)
UNIT_KEYS: dict[str, tuple[str, Quantity, float]] = {
    CONF_W0: (CONF_W0 + SUFFIX_UM, Quantity.LENGTH, 1e-6),
    CONF_SIGMA_Z: (CONF_SIGMA_Z + SUFFIX_UM, Quantity.LENGTH, 1e-6),
    CONF_Z_MIN: (CONF_Z_MIN + SUFFIX_UM, Quantity.LENGTH, 1e-6),
    CONF_Z_MAX: (CONF_Z_MAX + SUFFIX_UM, Quantity.LENGTH, 1e-6),
    CONF_FALL_OFFSET: (CONF_FALL_OFFSET + SUFFIX_UM, Quantity.LENGTH, 1e-6),
    CONF_TOTAL_TIME: (CONF_TOTAL_TIME + SUFFIX_MS, Quantity.TIME, 1e-3),
}


def _power_of_two(value: int) -> int:
    if value & (value - 1):
        raise vol.Invalid(f"must be a power of two, got {value}")
    return value


FLOAT = vol.Coerce(float)
POSITIVE = vol.All(FLOAT, vol.Range(min=0, min_included=False))
NON_NEGATIVE = vol.All(FLOAT, vol.Range(min=0))
COUNT = vol.All(vol.Coerce(int), vol.Range(min=1))

UNIT_SCHEMA = {
    CONF_W0: POSITIVE,
    CONF_SIGMA_Z: POSITIVE,
    CONF_Z_MIN: FLOAT,
    CONF_Z_MAX: FLOAT,
    CONF_FALL_OFFSET: FLOAT,
    CONF_TOTAL_TIME: NON_NEGATIVE,
}

CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_V1): NON_NEGATIVE,
        vol.Optional(CONF_V2): NON_NEGATIVE,
        vol.Optional(CONF_PHI): FLOAT,
        vol.Optional(CONF_WAVELENGTH): POSITIVE,
        vol.Optional(CONF_ATOM_MASS): POSITIVE,
        vol.Optional(CONF_GRAVITY): NON_NEGATIVE,
        vol.Optional(CONF_BARRIER_HEIGHT): NON_NEGATIVE,
        vol.Optional(CONF_Q0): vol.All(FLOAT, vol.Range(min=-1.0, max=1.0)),
        vol.Optional(CONF_ENGINE): vol.All(str, vol.Lower, vol.In(ENGINES)),
        vol.Optional(CONF_DT): POSITIVE,
        vol.Optional(CONF_N_POINTS): vol.All(
            vol.Coerce(int), vol.Range(min=MIN_GRID_POINTS), _power_of_two
        ),
        vol.Optional(CONF_N_CUT): vol.All(
            vol.Coerce(int), vol.Range(min=CONF_N_CUT_MIN, max=CONF_N_CUT_MAX)
        ),
        vol.Optional(CONF_FIT_HALFWIDTH): POSITIVE,
        vol.Optional(CONF_ABSORBER): vol.Boolean(),
        vol.Optional(CONF_LOAD_BAND): vol.Boolean(),
        vol.Optional(CONF_DETECT_OFFSET): NON_NEGATIVE,
        vol.Optional(CONF_WORKERS): vol.All(
            vol.Coerce(int), vol.Range(min=1, max=CONF_WORKERS_MAX)
        ),
        vol.Optional(CONF_PHI_POINTS): COUNT,
        vol.Optional(CONF_VB_POINTS): COUNT,
        vol.Optional(CONF_VB_MAX): NON_NEGATIVE,
        **{vol.Optional(key): validator for key, validator in UNIT_SCHEMA.items()},
        **{
            vol.Optional(UNIT_KEYS[key][0]): validator
            for key, validator in UNIT_SCHEMA.items()
        },
    }
)

KNOWN_KEYS = frozenset(str(key) for key in CONFIG_SCHEMA.schema)


def _tokenize(
    lines: Iterable[str], source: dict[str, int | None], numbered: bool
) -> dict[str, str]:
    values: dict[str, str] = {}
    for number, raw in enumerate(lines, start=1):
        line_no = number if numbered else None
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        key, sep, value = text.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError("expected 'key = value'", line=line_no)
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", key=key, line=line_no)
        if numbered and key in values:
            raise ConfigError("duplicate key", key=key, line=line_no)
        values[key] = value
        source[key] = line_no
    return values


def parse_config(text: str, overrides: Iterable[str] = ()) -> ScenarioConfig:
    """Parse a scenario file plus `key=value` overrides into a ScenarioConfig.

    Overrides win over file values. Suffixed keys (`_um`, `_ms`) are converted
    to recoil units with the constants of the same file; a base key and its
    suffixed variant are mutually exclusive.
    """
    source: dict[str, int | None] = {}
    raw = _tokenize(text.splitlines(), source, numbered=True)
    for key, value in _tokenize(overrides, source, numbered=False).items():
        # an override replaces whichever unit variant the file used
        for base, (suffixed, _, _) in UNIT_KEYS.items():
            if key in (base, suffixed):
                raw.pop(base, None)
                raw.pop(suffixed, None)
        raw[key] = value

    try:
        data: dict[str, Any] = CONFIG_SCHEMA(raw)
    except vol.MultipleInvalid as err:
        first = err.errors[0]
        key = str(first.path[0]) if first.path else None
        raise ConfigError(first.msg, key=key, line=source.get(key) if key else None) from err

    for base, (suffixed, _, _) in UNIT_KEYS.items():
        if base in data and suffixed in data:
            raise ConfigError(
                f"conflicts with '{base}'", key=suffixed, line=source.get(suffixed)
            )

    try:
        config = _build(data)
    except InvalidParameterError as err:
        raise ConfigError(str(err)) from err
    _LOGGER.debug("Parsed configuration with %d explicit keys", len(data))
    return config


def _build(data: dict[str, Any]) -> ScenarioConfig:
    defaults = ScenarioConfig()
    constants = PhysicalConstants()
    constants = replace(
        constants,
        wavelength=data[CONF_WAVELENGTH] * 1e-9
        if CONF_WAVELENGTH in data
        else constants.wavelength,
        atom_mass=data.get(CONF_ATOM_MASS, constants.atom_mass),
        gravity=data.get(CONF_GRAVITY, constants.gravity),
    )
    scale = recoil_scale(constants)

    def dimensionless(base: str, default: Any) -> Any:
        suffixed, quantity, factor = UNIT_KEYS[base]
        if suffixed in data:
            return scale.to_dimensionless(data[suffixed] * factor, quantity)
        return data.get(base, default)

    lattice = LatticeParams(
        v1=data.get(CONF_V1, defaults.lattice.v1),
        v2=data.get(CONF_V2, defaults.lattice.v2),
        phi=data.get(CONF_PHI, defaults.lattice.phi),
    )
    return ScenarioConfig(
        lattice=lattice,
        constants=constants,
        barrier_height_vb=data.get(CONF_BARRIER_HEIGHT, defaults.barrier_height_vb),
        w0=dimensionless(CONF_W0, None),
        q0=data.get(CONF_Q0, defaults.q0),
        sigma_z=dimensionless(CONF_SIGMA_Z, defaults.sigma_z),
        total_time=dimensionless(CONF_TOTAL_TIME, None),
        engine=data.get(CONF_ENGINE, defaults.engine),
        dt=data.get(CONF_DT),
        n_points=data.get(CONF_N_POINTS),
        z_min=dimensionless(CONF_Z_MIN, defaults.z_min),
        z_max=dimensionless(CONF_Z_MAX, defaults.z_max),
        n_cut=data.get(CONF_N_CUT, defaults.n_cut),
        fit_halfwidth=data.get(CONF_FIT_HALFWIDTH, defaults.fit_halfwidth),
        absorber=data.get(CONF_ABSORBER, defaults.absorber),
        load_band=data.get(CONF_LOAD_BAND, defaults.load_band),
        detect_offset_w0=data.get(CONF_DETECT_OFFSET, defaults.detect_offset_w0),
        fall_offset=dimensionless(CONF_FALL_OFFSET, defaults.fall_offset),
        workers=data.get(CONF_WORKERS, defaults.workers),
        phi_points=data.get(CONF_PHI_POINTS, defaults.phi_points),
        vb_points=data.get(CONF_VB_POINTS, defaults.vb_points),
        vb_max=data.get(CONF_VB_MAX, defaults.vb_max),
    )
