"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class SignedNetError(Exception):
    """Base class for all errors raised by signednet."""


class DataError(SignedNetError):
    """Input data is malformed or inconsistent with the request."""


class ParseError(DataError):
    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class UsageError(SignedNetError):
    """Invalid parameters or options."""


class ConvergenceError(SignedNetError):
    """An iterative solver did not reach its tolerance.

    ``residuals`` holds the best residual norms (or the last delta for
    power iteration) at the moment the solver gave up.
    """

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class DataWarning(UserWarning):
    """Recoverable input anomaly (self-loop, duplicate edge, empty troll set)."""
