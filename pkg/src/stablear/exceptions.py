"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A distribution or model parameter is outside its domain."""


class DomainError(ValueError):
    """A function argument is outside the operation's domain."""


class BoundaryError(DomainError):
    """Parameters too close to the domain boundary for the requested operation."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its stated tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class InputError(ValueError):
    """Malformed user input (files, series, configuration)."""
