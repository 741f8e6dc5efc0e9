"""Exception hierarchy.

Numeric failures derive from :class:`NumericError` and configuration problems
from :class:`ConfigError`; the CLI maps these two groups to distinct exit
codes.
"""


class TLSWError(Exception):
    """Base class for all package errors."""


class ConfigError(TLSWError, ValueError):
    pass


class NumericError(TLSWError, ValueError):
    pass


class UnsupportedFilter(ConfigError):
    pass


class UnsupportedOrder(ConfigError):
    pass


class UnknownPreset(ConfigError):
    pass


class KindMismatch(ConfigError):
    pass


class DepthExceeded(NumericError):
    pass


class SeriesTooShort(NumericError):
    pass


class NonDyadicLength(NumericError):
    pass


class ShapeMismatch(NumericError):
    pass


class SingularMatrix(NumericError):
    pass


class AllNegativeRow(NumericError):
    pass
