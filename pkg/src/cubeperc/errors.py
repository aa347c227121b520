"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An argument is outside the domain an operation accepts."""


class FeasibilityError(ValidationError):
    """An exhaustive computation was requested beyond its hard-coded budget."""


class TrialError(RuntimeError):
    """A Monte Carlo trial raised; carries the index of the failing trial."""

    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"trial {index} failed: {cause!r}")
        self.index = index
        self.cause = cause
