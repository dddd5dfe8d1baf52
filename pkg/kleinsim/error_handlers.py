"""Central error handling for the kleinsim command line."""

from __future__ import annotations

import logging
import sys
from typing import TextIO

from .const import (
    EXIT_CONFIG,
    EXIT_INVALID_PARAMETER,
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_UNKNOWN,
)
from .exceptions import KleinSimError

_LOGGER = logging.getLogger(__name__)

EXIT_CODES = {
    "config": EXIT_CONFIG,
    "invalid_parameter": EXIT_INVALID_PARAMETER,
    "clipped_packet": EXIT_INVALID_PARAMETER,
    "classically_forbidden": EXIT_INVALID_PARAMETER,
    "degenerate_state": EXIT_INVALID_PARAMETER,
    "no_barrier": EXIT_INVALID_PARAMETER,
    "eigensolver": EXIT_NUMERICAL,
    "ill_conditioned_fit": EXIT_NUMERICAL,
    "norm_drift": EXIT_NUMERICAL,
    "plot": EXIT_NUMERICAL,
    "io": EXIT_IO,
}


def error_category(err: BaseException) -> str:
    if isinstance(err, KleinSimError):
        return err.category
    if isinstance(err, OSError):
        return "io"
    return "unknown"


def handle_run_error(command: str, err: BaseException, stream: TextIO | None = None) -> int:
    """Report `err` as one `error: <category>: <message>` line and return the exit code."""
    category = error_category(err)
    message = " ".join(str(err).split()) or type(err).__name__
    if category == "unknown":
        _LOGGER.exception("Unexpected failure in %s", command)
    else:
        _LOGGER.debug("%s failed with %s", command, category, exc_info=err)
    print(f"error: {category}: {message}", file=stream or sys.stderr)
    return EXIT_CODES.get(category, EXIT_UNKNOWN)
