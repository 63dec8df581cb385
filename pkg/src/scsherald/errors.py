"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter lies outside its physical domain."""


class TruncationError(ArithmeticError):
    """A Fock cutoff is too small for the requested tolerance."""


class ConvergenceError(ArithmeticError):
    """A series or iterative computation failed to converge."""
