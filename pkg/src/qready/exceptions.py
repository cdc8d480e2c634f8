"""Exception types shared across the package."""


class QreadyError(Exception):
    """Base class for all qready errors."""


class DimensionError(QreadyError):
    """A vector or index does not fit the instance it is used with."""


class InvalidInstanceError(QreadyError):
    """An instance violates a structural invariant."""


class ParseError(QreadyError):
    """An instance file is malformed. Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CatalogError(QreadyError):
    """The instance catalog file does not match the expected schema."""


class UndefinedRatioError(QreadyError):
    """Relative delta energy is undefined because the reference is zero.

    Callers should fall back to the absolute delta.
    """


class InnerSamplerError(QreadyError):
    """An inner sampler failed while solving a subproblem."""
