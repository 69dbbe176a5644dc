"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 1); numerical
failures derive from :class:`NumericalError` (CLI exit code 2).
"""


class InputError(ValueError):
    """Rejected input: domain violation, malformed file, bad configuration."""


class DomainError(InputError):
    """A demand or price lies outside the utility function's domain."""


class CalibrationError(InputError):
    """The anchor point cannot be calibrated (e.g. quadratic with a*d0 >= 1)."""


class InfiniteRiskAversionError(InputError):
    """Zero elasticity maps to an infinite risk-aversion coefficient."""


class DataError(InputError):
    """Malformed input document. ``line`` is 1-based when known."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class NumericalError(ArithmeticError):
    """Base class for solver failures."""


class InfeasibleBudgetError(NumericalError):
    """No non-negative allocation spends exactly the requested budget."""


class ConvergenceError(NumericalError):
    """Bisection did not reach tolerance; ``bracket`` holds the last (lo, hi)."""

    def __init__(self, message, bracket=None, iterations=None):
        self.bracket = bracket
        self.iterations = iterations
        super().__init__(message)


class CornerSolutionError(NumericalError):
    """The closed-form allocation left the interior; use the numeric solver."""

    def __init__(self, message, demands=None):
        self.demands = demands
        super().__init__(message)


class SingularityError(NumericalError):
    """Marginal utility vanishes (quadratic at its saturation point)."""
