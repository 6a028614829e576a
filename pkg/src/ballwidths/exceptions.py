"""Exception hierarchy shared by the library and the command line."""


class WidthError(Exception):
    """Base class for all errors raised by ballwidths."""


class InvalidInputError(WidthError, ValueError):
    """Malformed input: non-finite coordinates, bad exponents, dimension mismatch."""


class PreconditionError(WidthError, ValueError):
    """A theorem's hypotheses are not met by the supplied family or query."""


class ConditionViolationError(PreconditionError):
    """The pairwise scale condition 1 <= kappa <= N fails for some pair of balls."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class DomainRangeError(PreconditionError):
    """An integer parameter (n, m, k) lies outside the admissible range."""


class RedirectError(PreconditionError):
    """q = inf was passed to the finite-q evaluator; use the l_inf evaluator."""


class UnsupportedRegimeError(WidthError, ValueError):
    """No order estimate is available for this combination of exponents."""


class ConfigError(WidthError, ValueError):
    """Invalid run configuration (schema or domain violation)."""
