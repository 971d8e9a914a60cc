"""
Exceptions raised by the regularization toolkit.
Each one also derives from the builtin a caller would naturally catch.
"""


class FormRegError(Exception):
    """Base class of every toolkit error."""


class ShapeError(FormRegError, ValueError):
    """Operand has the wrong shape (non-square, size mismatch)."""


class InvalidFormError(FormRegError, ValueError):
    """Form kind is not legal for the scalar field."""


class DomainError(FormRegError, ValueError):
    """Argument lies outside the operation's domain, or scalar specs are mixed."""


class PreconditionError(FormRegError, ValueError):
    """Caller violated a documented precondition."""


class InvariantViolationError(FormRegError, RuntimeError):
    """A structural invariant of a result does not hold."""


class UnsupportedError(FormRegError, NotImplementedError):
    """Operation is not offered for the requested backend."""


class MatrixFileError(FormRegError, ValueError):
    """Matrix file could not be parsed."""

    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DigestMismatchError(FormRegError, ValueError):
    """Report was produced from a different input matrix."""
