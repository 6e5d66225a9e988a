"""
Exception hierarchy for the Kirchhoff solver package.

Every failure the CLI can report derives from KirchhoffError and carries the
process exit code the harness maps it to.
"""

from typing import Any, Dict, Optional


class KirchhoffError(Exception):
    """Base class for all package errors."""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form written to error.json by the CLI."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            "details": self.details,
        }


class ConfigError(KirchhoffError):
    """Malformed or inconsistent run configuration."""

    exit_code = 2


class GridError(ConfigError):
    """Grid parameters out of range or over the memory budget."""


class RegimeError(ConfigError):
    """Exponent p falls in the L²-critical band that no solver covers."""


class PotentialError(ConfigError):
    """Potential family is not integrable for the requested exponents."""


class ZeroFieldError(KirchhoffError):
    """An operation that needs u != 0 received the zero field."""


class FieldFormatError(KirchhoffError):
    """A KFLD file or sidecar could not be decoded."""


class ConvergenceError(KirchhoffError):
    """A solver stopped without meeting its residual tolerance."""

    exit_code = 1


class AssumptionError(KirchhoffError):
    """A hypothesis or threshold needed by the requested mode is violated."""

    exit_code = 3


class NoPositiveRegionError(AssumptionError):
    """The landscape function never becomes positive."""


class PathCollapseError(AssumptionError):
    """The mountain-pass path attains its maximum at an endpoint."""


class CertificationError(AssumptionError):
    """The linking lattice does not certify the level bracket."""
