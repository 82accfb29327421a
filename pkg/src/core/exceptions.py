"""
Model Exceptions

Custom error types for invalid inputs and violated preconditions.
Every failure class is a distinct exception type for precise handling at the
CLI boundary and in the check ledger.

Failed verifications are not exceptions: they come back as CheckReport data.
"""


class ModelError(Exception):
    """Base exception for all model construction and evaluation errors."""
    pass


class SizeMismatchError(ModelError):
    """Raised when two objects live on alphabets of different size."""
    pass


class NotBijectiveError(ModelError):
    """Raised when a table that must be a bijection has a collision."""
    pass


class PoleError(ModelError):
    """Raised when a spectral parameter hits the pole z = -1."""
    pass


class BoundExceededError(ModelError):
    """Raised when a state space or search space exceeds its configured bound."""
    pass


class PreconditionError(ModelError):
    """Raised when an operation is called outside its domain."""
    pass


class ParseError(ModelError):
    """Raised when a model or schedule file cannot be parsed."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        if line:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
