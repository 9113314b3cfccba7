"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class RegimeError(ValueError):
    """The inputs are valid but the approximation has no solution there."""


class ConvergenceError(RuntimeError):
    """An iterative search hit its iteration cap."""
