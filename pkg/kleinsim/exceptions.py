"""Errors raised by the kleinsim simulator."""

from __future__ import annotations


class KleinSimError(Exception):
    """Base class for all simulator errors.

    `category` is the machine-readable key reported by the CLI.
    """

    category = "unknown"


class ConfigError(KleinSimError):
    """Error to indicate an invalid configuration entry."""

    category = "config"

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


class InvalidParameterError(KleinSimError, ValueError):
    """Error to indicate a violated operation precondition."""

    category = "invalid_parameter"


class EigensolverError(KleinSimError):
    """Error to indicate the Hermitian eigensolver did not converge."""

    category = "eigensolver"


class FitError(KleinSimError):
    """Error to indicate an ill-conditioned Dirac fit."""

    category = "ill_conditioned_fit"

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(message)


class NormDriftError(KleinSimError):
    """Error to indicate the propagator lost or gained probability."""

    category = "norm_drift"


class DegenerateStateError(KleinSimError):
    """Error to indicate a spinor direction is undefined."""

    category = "degenerate_state"


class BarrierError(KleinSimError):
    """Error to indicate gravity leaves no barrier."""

    category = "no_barrier"


class ClassicallyForbiddenError(KleinSimError):
    """Error to indicate no classical trajectory exists."""

    category = "classically_forbidden"


class ClippedPacketError(KleinSimError):
    """Error to indicate a wave packet does not fit in the domain."""

    category = "clipped_packet"


class PlotError(KleinSimError):
    """Error to indicate plot input cannot be drawn."""

    category = "plot"
