"""Exception hierarchy shared by all modules."""


class EffCapError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(EffCapError, ValueError):
    """Invalid model or system parameters."""


class DomainError(EffCapError, ValueError):
    """Argument outside the domain of a function (e.g. negative gain)."""


class SingularityError(EffCapError, ArithmeticError):
    """A ratio with a vanishing denominator was requested."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class SolverError(EffCapError, RuntimeError):
    """A root finder or maximizer could not bracket or converge.

    ``bracket`` carries the interval that was scanned so callers can report
    where the search looked.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class MultipleRootsError(SolverError):
    """More than one root was found where uniqueness is not guaranteed."""

    def __init__(self, message, roots=(), bracket=None):
        super().__init__(message, bracket=bracket)
        self.roots = tuple(roots)


class EstimationError(EffCapError, RuntimeError):
    """A statistical estimate cannot be formed from the available samples."""
