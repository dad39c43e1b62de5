"""Exception hierarchy shared across the engine."""


class DamuError(Exception):
    """Base class for every error raised by this package."""


class RangeError(DamuError, ValueError):
    """An input lies outside the range a model is defined for."""


class DomainError(DamuError, ValueError):
    """An input is mathematically invalid (negative length, bank of 90 deg...)."""


class InfeasibleError(DamuError, ValueError):
    pass


class DegenerateGeometryError(DamuError, ValueError):
    pass


class OutOfValidityError(DamuError, ValueError):
    """The path or angle is outside the validity region of an ITU model."""


class DataFileError(DamuError):
    pass


class ScenarioError(DamuError):
    """A scenario or weather document could not be parsed.

    ``line`` is the 1-based line number in the source document when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationFailed(DamuError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"{len(self.violations)} scenario violation(s)")
