"""Exception hierarchy.

Every numerical precondition failure derives from :class:`NumericalDomainError`
so callers (the CLI in particular) can map them to one exit status.
"""


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


class NumericalDomainError(ValueError):
    """Base class for violated numerical preconditions."""


class NonHermitian(NumericalDomainError):
    pass


class InvalidExponent(NumericalDomainError):
    pass


class DimensionMismatch(NumericalDomainError):
    pass


class AlphaOutOfRange(NumericalDomainError):
    pass


class NegativeTime(NumericalDomainError):
    pass


class EmptyGrid(NumericalDomainError):
    pass


class StepTooLarge(NumericalDomainError):
    pass


class StateInvariantViolated(NumericalDomainError):
    pass


class UnsupportedChannel(NumericalDomainError):
    pass


class DomainViolation(NumericalDomainError):
    pass


class SingularPureState(NumericalDomainError):
    pass


class OutOfRange(NumericalDomainError):
    pass


class EmptySearchGrid(NumericalDomainError):
    pass


class DegenerateState(NumericalDomainError):
    """Closed form undefined at the maximally mixed point.

    The coherence there is zero by continuity; it is carried on ``value``.
    """

    def __init__(self, message, value=0.0):
        super().__init__(message)
        self.value = value
