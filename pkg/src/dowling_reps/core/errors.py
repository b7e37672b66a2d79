"""Domain errors shared across subpackages."""


class BadParametersError(ValueError):
    """Parameters outside an operation's precondition."""


class RankDeficientError(ValueError):
    """A matrix that must have full rank does not."""


class BudgetExceededError(ValueError):
    """An enumeration or sampling bound was reached."""
