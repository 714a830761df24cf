"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An operation was asked to condition on a null event or got invalid input."""


class BudgetError(RuntimeError):
    """A computation would exceed the configured size budget for its precision mode."""
