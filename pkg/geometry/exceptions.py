class GeometryError(Exception):
    """Base class for every error raised by the geometry engine."""


class OrderMismatchError(GeometryError, ValueError):
    """Two series (or elements built on them) carry different truncation orders."""


class ContextMismatchError(GeometryError, ValueError):
    """Elements of different algebras or module contexts were combined."""


class NonUnitError(GeometryError, ZeroDivisionError):
    """Inversion of a series, scalar or matrix that is not a unit."""


class DegreeError(GeometryError, ValueError):
    """A tensor has the wrong slot layout or form degree for the operation."""


class SpecError(GeometryError):
    """The geometry specification is malformed or inconsistent."""


class ParseError(SpecError, ValueError):
    """Syntax error in an expression or in a geometry file.

    ``line`` and ``column`` are 1-based; either may be None when unknown.
    """

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(self.__str__())

    def __str__(self):
        if self.line is None and self.column is None:
            return self.message
        if self.line is None:
            return f"column {self.column}: {self.message}"
        return f"line {self.line}, column {self.column or 1}: {self.message}"

    def shifted(self, line, column_offset=0):
        """Re-anchor an expression-level error inside a file."""
        column = (self.column or 1) + column_offset
        return ParseError(self.message, line=line, column=column)


class InvarianceError(SpecError):
    """A declared structure violates a required invariant."""


class SolverError(GeometryError):
    """A solve finished with nonzero residuals."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}
