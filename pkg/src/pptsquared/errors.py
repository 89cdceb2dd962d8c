"""Exception hierarchy.

Two families matter to callers: validation failures (bad input, violated
hypotheses) and numerical failures (an algorithm did not deliver). The CLI maps
them to exit codes 1 and 2 respectively.
"""


class PPTError(Exception):
    """Base class for all package errors."""


class ValidationFailure(PPTError, ValueError):
    pass


class NumericalFailure(PPTError, ArithmeticError):
    pass


class DimensionMismatch(ValidationFailure):
    pass


class NonHermitianInput(ValidationFailure):
    pass


class InvalidAdjacency(ValidationFailure):
    pass


class ParseError(ValidationFailure):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphValidationError(ValidationFailure):
    pass


class NotPPT(ValidationFailure):
    pass


class NotScalarUnital(ValidationFailure):
    pass


class NotPowerBounded(ValidationFailure):
    pass


class NoConvergence(NumericalFailure):
    pass


class DefectivePeripheralSpectrum(NumericalFailure):
    pass


class NoProgress(NumericalFailure):
    """Raised by the theta solver; the best feasible solution rides along."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution
