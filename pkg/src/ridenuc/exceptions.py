class ParseError(ValueError):
    """Malformed instance or characteristic-table input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ScaleLimitError(ValueError):
    """Problem size beyond what the exact solvers accept."""


class NumericalError(ArithmeticError):
    """LP or fixation step failed for numerical reasons."""
