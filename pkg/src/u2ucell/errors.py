"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ConvergenceError(RuntimeError):
    """A series failed to converge within its term budget.

    Carries the partial sum and the number of terms consumed so callers
    can decide whether the partial value is still usable.
    """

    def __init__(self, message, partial_value=None, terms_used=None):
        super().__init__(message)
        self.partial_value = partial_value
        self.terms_used = terms_used


class ToleranceError(RuntimeError):
    """A numerical evaluation could not reach the requested tolerance."""


class ConfigError(ValueError):
    """A scenario configuration failed validation.

    ``field`` holds the dotted path of the offending entry when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
