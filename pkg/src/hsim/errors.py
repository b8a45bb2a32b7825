"""Exception types shared across the package."""


class SpecError(Exception):
    """A system description failed validation."""


class SpecFileError(SpecError):
    """A spec document could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericError(Exception):
    """A numeric routine failed to produce a usable result."""
