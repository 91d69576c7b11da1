"""Exceptions shared across the solver modules."""


class SolverTimeout(RuntimeError):
    """The search ran past its deadline before finishing."""


class SizeLimit(ValueError):
    """An exhaustive routine was asked for more work than its budget allows."""


class InfeasibleSpec(ValueError):
    """An instance spec cannot be realised under its caps."""
