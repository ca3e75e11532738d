"""Exception types raised by the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ParseError(ValueError):
    """A function file or text value could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
