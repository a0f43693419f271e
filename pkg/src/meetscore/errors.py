"""Exception types shared across the toolkit."""

from __future__ import annotations


class MeetscoreError(Exception):
    """Base class for all toolkit errors."""


class ParseError(MeetscoreError):
    """Malformed input file. Carries the byte offset of the failure."""

    def __init__(self, message: str, *, offset: int | None = None, path=None):
        self.offset = offset
        self.path = path
        prefix = f"{path}: " if path else ""
        suffix = f" (byte offset {offset})" if offset is not None else ""
        super().__init__(f"{prefix}{message}{suffix}")


class SchemaError(MeetscoreError):
    """Structurally valid JSON that does not follow the segLST schema."""

    def __init__(self, message: str, *, index: int | None = None, path=None):
        self.index = index
        self.path = path
        prefix = f"{path}: " if path else ""
        where = f"element {index}: " if index is not None else ""
        super().__init__(f"{prefix}{where}{message}")


class LayoutError(MeetscoreError):
    """Dataset directory does not follow the expected layout."""


class ContractError(MeetscoreError):
    """A caller violated a documented precondition."""


class UndefinedRateError(MeetscoreError):
    """A rate was requested with a zero denominator (e.g. empty reference)."""
