"""Exception hierarchy.

Every failure a caller can trigger maps to a named subclass of
:class:`SymflowError`; the CLI prints the class name on stderr.
"""


class SymflowError(Exception):
    """Base class for all domain errors raised by symflow."""


class ValidationError(SymflowError):
    """A model or value violates a structural invariant."""


class DanglingVertex(ValidationError):
    def __init__(self, vertex, missing):
        self.vertex = vertex
        self.missing = missing
        super().__init__(f"vertex {vertex!r} has no {missing} edge")


class DuplicateVertex(ValidationError):
    pass


class UnknownEndpoint(ValidationError):
    pass


class InvalidPoint(ValidationError):
    """A sequence is not a path on the graph it is used with."""


class GraphMismatch(ValidationError):
    pass


class MissingBlock(ValidationError):
    pass


class HeightMismatch(SymflowError):
    pass


class NotOnOrbit(SymflowError):
    pass


class NotPeriodic(SymflowError):
    pass


class NotTransitive(SymflowError):
    pass


class NeverReturns(SymflowError):
    pass


class EpsilonTooLarge(SymflowError):
    pass


class ConsistencyFailure(SymflowError):
    """An internal certificate failed; indicates a bug, not bad input."""


class ParseError(SymflowError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
