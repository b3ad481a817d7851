"""Exception hierarchy shared by all lpdecode modules."""


class LpdecodeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LpdecodeError, ValueError):
    """An argument is outside the domain an operation is defined on."""


class SingularityError(LpdecodeError):
    """A linear system is numerically rank-deficient."""


class NumericError(LpdecodeError):
    """A computation produced non-finite values or failed to reach its tolerance."""
