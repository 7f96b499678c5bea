"""Error hierarchy shared across the kernel and the synthesis layers."""

from __future__ import annotations


class IdttError(Exception):
    """Base class for all errors raised by this package."""


class IllScopedVariable(IdttError):
    pass


class UnknownSymbol(IdttError):
    pass


class ArityMismatch(IdttError):
    pass


class TypeMismatch(IdttError):
    """Conversion failure; carries the normal-form divergence trace."""

    def __init__(self, message: str, trace: str | None = None):
        super().__init__(message if trace is None else f"{message}\n  trace: {trace}")
        self.trace = trace


class MotiveMismatch(IdttError):
    pass


class DomainMismatch(IdttError):
    pass


class EndpointMismatch(IdttError):
    pass


class NonTermination(IdttError):
    """Normalization exceeded its step budget; indicates a kernel bug."""


class InternalInvariantViolation(IdttError):
    """A synthesized term failed an equation the construction guarantees."""


class UnsupportedLeftMap(IdttError):
    pass


class UnsupportedRightMap(IdttError):
    pass


class CommutativityFailure(IdttError):
    pass


class NotAFiller(IdttError):
    pass


class NotADisplayMap(IdttError):
    pass


class NonFreeSignature(IdttError):
    pass


class NoClosedPoints(IdttError):
    pass


class UnrepresentablePathImage(IdttError):
    """Normal form of a path image is not generated by declared path constants."""


class EnumerationBoundExceeded(IdttError):
    pass


class SurfaceSyntaxError(IdttError):
    """Parse error with a source span."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class DuplicateName(SurfaceSyntaxError):
    pass
