"""Exception hierarchy shared by all modules."""


class BJJError(Exception):
    """Base class for errors raised by :mod:`bjjsim`."""


class ConfigurationError(BJJError, ValueError):
    """Inconsistent shapes, invalid presets, malformed config files."""


class DomainError(BJJError, ValueError):
    """Arguments outside the mathematical domain of an operation."""


class InfeasibleGeometryError(DomainError):
    """A target coupling cannot be realized by the coupling-distance law."""

    def __init__(self, message, axis=None, index=None):
        super().__init__(message)
        self.axis = axis
        self.index = index


class NumericalError(BJJError, ArithmeticError):
    """Eigensolver failure or loss of accuracy."""


class OutputError(BJJError, OSError):
    """Failure while writing result files."""
