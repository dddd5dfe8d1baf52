"""Binary wavefunction snapshots and CSV density profiles."""

from __future__ import annotations

import csv
import logging
import struct
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .exceptions import InvalidParameterError
from .grid import GridSpec

_LOGGER = logging.getLogger(__name__)

# magic, u32 n_points, f64 z_min, f64 z_max, f64 time
SNAPSHOT_HEADER = struct.Struct("<4sIddd")


def write_snapshot(
    path: Path,
    magic: bytes,
    grid: GridSpec,
    time: float,
    components: list[NDArray[np.complex128]],
) -> None:
    """Write components as little-endian f64 (Re, Im) pairs interleaved per grid point."""
    payload = np.empty((grid.n_points, 2 * len(components)), dtype="<f8")
    for index, component in enumerate(components):
        payload[:, 2 * index] = component.real
        payload[:, 2 * index + 1] = component.imag
    with path.open("wb") as handle:
        handle.write(
            SNAPSHOT_HEADER.pack(magic, grid.n_points, grid.z_min, grid.z_max, time)
        )
        handle.write(payload.tobytes())
    _LOGGER.info("Wrote snapshot %s (%d points, t=%.6g)", path, grid.n_points, time)


def read_snapshot(
    path: Path, magic: bytes, n_components: int
) -> tuple[GridSpec, float, list[NDArray[np.complex128]]]:
    """Read a snapshot written by `write_snapshot`."""
    raw = path.read_bytes()
    found, n_points, z_min, z_max, time = SNAPSHOT_HEADER.unpack_from(raw)
    if found != magic:
        raise InvalidParameterError(f"{path}: expected magic {magic!r}, found {found!r}")
    payload = np.frombuffer(
        raw, dtype="<f8", count=2 * n_components * n_points, offset=SNAPSHOT_HEADER.size
    ).reshape(n_points, 2 * n_components)
    components = [
        payload[:, 2 * index] + 1j * payload[:, 2 * index + 1]
        for index in range(n_components)
    ]
    return GridSpec(z_min, z_max, n_points), time, components


def write_profile_csv(
    path: Path, columns: dict[str, NDArray[np.float64]]
) -> None:
    """Write equally long columns as CSV with 12 significant digits."""
    names = list(columns)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*(columns[name] for name in names), strict=True):
            writer.writerow([f"{value:.12g}" for value in row])
    _LOGGER.info("Wrote profile %s", path)
