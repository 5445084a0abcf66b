"""Exception hierarchy shared by every distgen module."""


class DistgenError(Exception):
    """Base class for all library errors."""


class DomainError(DistgenError, ValueError):
    """Argument outside the domain of an operation, or an indeterminate form."""


class PreconditionError(DistgenError, ValueError):
    """A documented precondition does not hold (e.g. a violated bracket)."""


class ConvergenceError(DistgenError, ArithmeticError):
    """An iterative method exhausted its budget.

    The best available estimate and its error estimate are kept so callers
    can decide whether the partial answer is still useful.
    """

    def __init__(self, message: str, value: float = float("nan"), err_est: float = float("inf")):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


class ParseError(DistgenError, ValueError):
    """Syntax error in a monotone expression; `offset` is a UTF-8 byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class SpecError(DistgenError, ValueError):
    """Structurally malformed generator specification or spec document."""


class ValidationFailed(DistgenError):
    """A spec was built without passing validation."""

    def __init__(self, report):
        failed = ", ".join(v.condition for v in report.failures())
        super().__init__(f"spec fails conditions: {failed}")
        self.report = report


class IntegrityError(DistgenError, ArithmeticError):
    """A computed CDF value left [0, 1] by more than the allowed slack."""


class UnsupportedError(DistgenError):
    """The requested operation is not available for this distribution's nature."""
