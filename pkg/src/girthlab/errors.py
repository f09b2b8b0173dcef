"""Shared exception types.

Exit-code mapping for the CLI lives in cli.py; these classes only carry
the failure category and a witness payload where one exists.
"""


class GirthLabError(Exception):
    """Base class for all library errors."""


class IngestionError(GirthLabError):
    """Malformed external input (edge lists, configs, serialized records)."""


class ConfigError(GirthLabError):
    """Invalid pipeline or generator configuration."""


class GeometryError(GirthLabError):
    """A geometric invariant that should hold was observed to fail.

    Carries an optional witness describing the violating configuration.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ResourceLimitError(GirthLabError):
    """A computation would exceed its declared budget (size or retries)."""
