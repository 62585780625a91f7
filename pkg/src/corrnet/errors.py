"""Exception types shared across the package."""


class CorrnetError(Exception):
    """Base class for every error raised by corrnet."""


class ValidationError(CorrnetError):
    """Input data or arguments violate a documented contract."""


class ParseError(CorrnetError):
    """A data file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
