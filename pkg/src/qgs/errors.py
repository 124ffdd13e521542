"""Exception hierarchy shared by every solver module."""


class QGSError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(QGSError, ValueError):
    """Input violates a precondition (shape, Hermiticity, parameter range, file schema)."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class DegeneracyError(ValidationError):
    """A unique maximizer was required but the top eigenvalue is degenerate."""


class StructuralError(ValidationError):
    """A result does not have the shape the artificial game guarantees."""


class NumericError(QGSError, ArithmeticError):
    """A numerical routine failed (e.g. eigensolver did not converge)."""
