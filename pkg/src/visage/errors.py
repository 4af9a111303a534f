"""Exception types shared across the package."""


class VisageError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(VisageError, ValueError):
    """An argument violates a documented precondition."""


class BoundsError(VisageError):
    """A rectangle or window does not fit inside its host image."""


class DegenerateTrainingError(VisageError):
    """Training cannot proceed (single-class data, no weak learner < 0.5 error, ...)."""


class ModelFormatError(VisageError):
    """A persisted model or cascade file could not be parsed.

    Carries the 1-based line number where parsing failed.
    """

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnsupportedKernelError(ModelFormatError):
    """Model file declares a kernel this implementation does not evaluate."""
