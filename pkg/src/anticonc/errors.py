"""Exception types shared across the package."""


class AntiConcError(Exception):
    """Base class for all package errors."""


class ParameterError(AntiConcError, ValueError):
    """Invalid distribution, diagonal or bound parameters.

    ``field`` names the offending parameter when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DomainError(AntiConcError, ValueError):
    """Argument outside the domain of an operation (e.g. a probability not in [0, 1])."""


class NumericError(AntiConcError, ArithmeticError):
    """A numerical routine failed to converge or hit an undefined point."""


class ValidationError(AntiConcError, ValueError):
    """A diagonal failed the copula-diagonal checks required before sampling."""


class UsageError(AntiConcError, ValueError):
    """Operation called with unusable input (empty sample, empty grid, ...)."""
