class ValidationError(ValueError):
    """An input violates a structural invariant (bad graph, matrix, or argument)."""


class CrossCheckError(RuntimeError):
    """Two independent computations of the same quantity disagree beyond tolerance."""
