"""Exception hierarchy.

Validation problems (bad parameters, bad configs) derive from ``ValueError``;
failures that only show up while integrating derive from
:class:`NumericalAbort` so a driver can tell the two apart.
"""


class SavglError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SavglError, ValueError):
    pass


class NumericalAbort(SavglError, ArithmeticError):
    """Raised when a run cannot continue (non-positive radicand etc.)."""

    def __init__(self, message, step=None):
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)
        self.step = step


class DegenerateParams(ValidationError):
    pass


class DegenerateLeadingCoefficient(ValidationError):
    pass


class PreconditionViolated(ValidationError):
    pass


class DiscriminantNegative(ValidationError):
    pass


class UnsupportedCase(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class GridTooLarge(ValidationError):
    pass


class NotConjugateSymmetric(ValidationError):
    pass


class BadEpsilon(ValidationError):
    pass


class BadShift(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class NonpositiveRadicand(NumericalAbort):
    pass


class NonpositiveShiftedEnergy(NumericalAbort):
    pass


class SingularSolve(NumericalAbort):
    pass


class SolutionBlowup(NumericalAbort):
    """The discrete solution left the range of finite floats."""
