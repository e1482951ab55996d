"""Domain errors raised by the decoding library.

Management commands turn these into ``CommandError``; HTTP views turn them into
400 responses.
"""

from __future__ import annotations


class InvalidArgumentError(ValueError):
    """An argument has the wrong length, shape or range."""


class ContractViolationError(RuntimeError):
    """A caller broke an operation's precondition (e.g. a zero remainder)."""


class EmptyDatasetError(InvalidArgumentError):
    def __init__(self, region: int, message: str | None = None):
        self.region = region
        super().__init__(message or f"Training bucket for region {region} is empty")


class ResultsIOError(OSError):
    def __init__(self, path, reason: str):
        self.path = str(path)
        super().__init__(f"{self.path}: {reason}")


__all__ = [
    "InvalidArgumentError",
    "ContractViolationError",
    "EmptyDatasetError",
    "ResultsIOError",
]
