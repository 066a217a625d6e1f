"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested quantity."""


class ConvergenceError(RuntimeError):
    """A numerical routine exhausted its budget before reaching tolerance."""


class NonTerminationError(RuntimeError):
    """Too many simulated paths failed to hit the absorbing boundary."""
