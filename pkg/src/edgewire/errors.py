"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument is outside the range an operation accepts."""


class InvalidEdge(ValueError):
    """A segment or parametric edge has zero length."""


class ParseError(ValueError):
    """Malformed input text. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
