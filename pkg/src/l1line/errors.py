"""Exception hierarchy shared by the solver, loaders and CLI."""

from __future__ import annotations


class L1LineError(Exception):
    """Base class for every error raised by this package."""


class InputError(L1LineError, ValueError):
    """Bad problem data or bad arguments."""


class ParseError(InputError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class NonPositiveWeight(ParseError):
    pass


class EmptyFile(InputError):
    pass


class OutOfRange(InputError):
    pass


class UnknownFixture(InputError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown fixture"


class DegenerateScale(InputError):
    pass


class DegenerateAbscissas(InputError):
    pass


class EmptySample(InputError):
    pass


class InvalidM(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class SingularL2(L1LineError):
    pass


class NumericalFailure(L1LineError):
    """The simplex could not continue for floating-point reasons."""


class NonPositivePivot(NumericalFailure):
    pass


class IterationLimitExceeded(NumericalFailure):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NotConverged(L1LineError):
    pass


class Converged(L1LineError):
    """Raised when an entering column is requested from an optimal tableau."""


class CyclingDetected(L1LineError):
    """A pivot sequence revisited a basis without improving SAR.

    ``report`` holds the partial fit (trace, line and SAR at the point the
    repeat was noticed) so callers can show the oscillation.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
