"""
Shared infrastructure: exceptions, check reports, the check ledger and
exact rational helpers.
"""

from src.core.exceptions import (
    BoundExceededError,
    ModelError,
    NotBijectiveError,
    ParseError,
    PoleError,
    PreconditionError,
    SizeMismatchError,
)
from src.core.report import CheckReport

__all__ = [
    "BoundExceededError",
    "CheckReport",
    "ModelError",
    "NotBijectiveError",
    "ParseError",
    "PoleError",
    "PreconditionError",
    "SizeMismatchError",
]
