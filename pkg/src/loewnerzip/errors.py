"""Exception hierarchy shared by the numerical modules and the CLI."""


class LoewnerZipError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(LoewnerZipError, ValueError):
    """Bad input: malformed config, curve file, or argument out of range."""


class NumericFailure(LoewnerZipError, ArithmeticError):
    """A computation could not be completed to the required accuracy."""

    def __init__(self, message, index=None):
        if index is not None:
            message = f"{message} (at curve index {index})"
        super().__init__(message)
        self.index = index


class DegenerateSlitError(NumericFailure):
    """Slit tip has non-positive imaginary part."""


class IllConditionedSlitError(NumericFailure):
    """Tilted slit angle too close to 0 or pi for the closed-form constants."""


class PointOnSlitError(NumericFailure):
    """Evaluation point lies on the slit being removed."""


class NonConvergenceError(NumericFailure):
    """Newton iteration for the tilted slit map did not converge."""


class SelfIntersectionError(NumericFailure):
    """An image tip collapsed onto the real axis while unzipping."""
