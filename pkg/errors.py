"""
Exception hierarchy for the partner-potential toolkit.

Every error carries a human readable message and an optional ``details``
mapping that the command line copies into its diagnostic JSON.
"""
from typing import Any, Dict, Optional


class SusyError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": self.details,
        }


class ConfigError(SusyError):
    """Run configuration could not be parsed or references missing files."""


class GridMismatch(SusyError):
    """Two grid functions were combined on different grids."""


class AsymmetricGrid(SusyError):
    """A parity check was requested on a grid not symmetric about 0."""


class AmbiguousAsymptotics(SusyError):
    """The tail of a solution is neither clearly growing, decaying nor oscillating."""


class KernelInput(SusyError):
    """A solution proportional to a transformation function was mapped."""

    def __init__(self, message: str, image=None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.image = image


class InconsistentSpec(SusyError):
    """Boundary signatures of the transformation functions match no case."""


class TransformError(SusyError):
    """A transformation cannot be built or reversed."""


class ResampleError(SusyError):
    """A potential cannot be resampled onto a discretization window."""


class NoConvergence(SusyError):
    """An iterative solver exhausted its iteration budget."""


class SolutionOverflow(SusyError, OverflowError):
    """An integrated solution exceeded the configured magnitude cap."""


class ConstraintViolation(SusyError):
    """Example parameters violate the constraints of the closed form."""
