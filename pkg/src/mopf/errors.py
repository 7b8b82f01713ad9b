"""Exception types shared across the package."""

from __future__ import annotations


class MopfError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MopfError):
    """Invalid input data: bad poset, marking, instance file or shape."""


class CycleError(ValidationError):
    """The cover relation contains a directed cycle."""


class DuplicateLabel(ValidationError):
    """A label (element or mark) was declared more than once."""


class UnknownLabel(ValidationError):
    """A label was referenced but never declared."""


class ExtremalNotMarked(ValidationError):
    """A minimal or maximal element carries no mark value.

    Every extremal element must be marked, otherwise the polytope is
    unbounded in that coordinate.
    """


class MarkingNotMonotone(ValidationError):
    """Mark values decrease along the order relation."""


class ParseError(ValidationError):
    """Malformed instance file; carries a 1-based line and column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class ShapeError(ValidationError):
    """Invalid interlacing-pattern shape (must be weakly decreasing, length >= 2)."""


class SizeLimit(MopfError):
    """An enumeration exceeded its configured cap."""


class UnboundedError(MopfError):
    """A polytope turned out to be unbounded; signals an upstream validation bug."""


class NotAComplex(MopfError):
    """Consecutive coboundary maps do not compose to zero."""
