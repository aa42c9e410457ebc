"""Exception types shared across the package.

Every error raised by the public API derives from :class:`RflError`, so
callers can catch one base class at an API boundary.  The concrete types
distinguish caller mistakes from numerical failures: the CLI maps
:class:`ConfigError` and :class:`ArgumentError` to exit code 2 and the
numerical family to exit code 3.
"""

from __future__ import annotations


class RflError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(RflError, ValueError):
    """An argument is outside the documented domain of an operation."""


class UnsupportedConfigurationError(RflError):
    """A parameter combination is recognized but deliberately not supported."""


class SingularGramError(RflError):
    """A Gram matrix stayed numerically singular through the whole jitter ladder."""


class DivergenceError(RflError):
    """An iterative computation produced non-finite values."""


class ResourceLimitError(RflError):
    """A requested computation exceeds a hard size limit."""


class ConfigError(RflError):
    """A configuration file or override set failed validation."""
