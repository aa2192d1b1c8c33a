"""Exception types raised across the package.

Anything deriving from :class:`ConfigurationError` means the caller asked for
something that can never work (bad bounds, a population too small for the
strategy pool, ...). The CLI maps those to exit code 2.
"""


class IStratDEError(Exception):
    """Base class for all package errors."""


class ConfigurationError(IStratDEError, ValueError):
    pass


class EmptyPoolRestriction(ConfigurationError):
    pass


class PopulationTooSmall(ConfigurationError):
    pass


class InvalidBounds(ConfigurationError):
    pass


class InsufficientPopulation(ConfigurationError):
    """Not enough eligible individuals left to draw a distinct index."""


class DimensionMismatch(ConfigurationError):
    pass


class BudgetExhaustedBeforeInit(ConfigurationError):
    pass


class InvalidDistribution(ConfigurationError):
    pass


class UnsupportedDimension(ConfigurationError):
    pass


class TooFewIndividuals(ConfigurationError):
    pass


class SampleTooSmall(ConfigurationError):
    pass


class EmptySample(ConfigurationError):
    pass


class MismatchedProtocol(ConfigurationError):
    pass
