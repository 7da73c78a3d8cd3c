"""
Exception hierarchy for bfar-radar.

Every library error derives from :class:`BfarError`, which itself derives
from :class:`ValueError`, so ``except ValueError`` keeps catching domain
problems raised anywhere in the package.
"""

from __future__ import annotations


class BfarError(ValueError):
    """Base class for all bfar-radar domain errors."""


class ParameterError(BfarError):
    """A parameter lies outside the domain of an operation or constructor."""


class ScanFormatError(BfarError):
    """A scan file or its sidecar could not be parsed."""


class RegistrationError(BfarError):
    """Point-cloud registration could not be attempted or lost all correspondences."""


class TrajectoryError(BfarError):
    """Trajectories are mismatched or too short for the requested evaluation."""


class LearningError(BfarError):
    """A parameter search produced no usable cell."""


class ConfigError(BfarError):
    """A ``key=value`` configuration file is malformed."""
