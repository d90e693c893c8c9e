class ValidationError(ValueError):
    """Input violates a documented precondition (bad shape, bad range, size guard)."""


class NumericalError(ArithmeticError):
    """A numeric routine failed to converge or produced non-finite values."""
