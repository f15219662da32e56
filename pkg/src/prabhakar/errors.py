"""Exception hierarchy shared by every module."""


class PrabhakarError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(PrabhakarError, ValueError):
    """An argument sits (numerically) on a pole of the gamma function."""


class ConditionError(PrabhakarError, ValueError):
    """Operator parameters violate the series convergence conditions."""


class NonConvergence(PrabhakarError, ArithmeticError):
    """A series hit its term cap while its terms were still large."""


class DomainError(PrabhakarError, ValueError):
    """Evaluation point or representation outside the supported domain."""


class SmoothnessError(PrabhakarError, ValueError):
    """The function cannot supply the derivatives an operation needs."""


class QuadratureFailure(PrabhakarError, ArithmeticError):
    """Quadrature error estimate exceeds the requested tolerance."""


class RangeError(PrabhakarError, ValueError):
    """Model parameters outside the range where a mapping is defined."""


class ConfigError(PrabhakarError, ValueError):
    """Invalid job or suite configuration; the message names the field."""
