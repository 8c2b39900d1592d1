"""Shared exception types."""


class BudgetExceededError(RuntimeError):
    """An enumeration or expansion would exceed the configured budget."""


class InfeasibleSystemError(ValueError):
    """A linear system x*M = B has no solution (distinct from an empty kernel)."""


class NoQualifyingTrialsError(RuntimeError):
    """A Monte Carlo conditioning event occurred in zero trials."""
