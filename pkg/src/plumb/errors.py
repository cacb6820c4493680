"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class PlumbError(Exception):
    """Base class for all domain errors raised by :mod:`plumb`."""


class GraphSyntaxError(PlumbError):
    """The graph file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class UnknownVertex(PlumbError):
    def __init__(self, vertex: str):
        self.vertex = vertex
        super().__init__(f"unknown vertex {vertex!r}")


class InvalidGraph(PlumbError):
    """Structurally well-formed input that is not a valid plumbing graph."""


class NotNegativeDefinite(InvalidGraph):
    def __init__(self, index: int, vertex: str, pivot, minor: int):
        self.index = index
        self.vertex = vertex
        self.pivot = pivot
        self.minor = minor
        super().__init__(
            f"intersection form is not negative definite: pivot {index} (vertex {vertex!r}) "
            f"is {pivot}, leading principal minor of order {index + 1} is {minor}"
        )


class EmptyRegion(PlumbError):
    pass


class RegionTooLarge(PlumbError):
    pass


class NotQhsLink(PlumbError):
    pass


class QOutOfRange(PlumbError):
    pass


class BudgetExhausted(PlumbError):
    """``realize_q`` gave up; ``stages`` holds the trace computed so far."""

    def __init__(self, message: str, stages=()):
        self.stages = tuple(stages)
        super().__init__(message)
