"""Exception types shared across the package."""


class RecalError(Exception):
    """Base class for all errors raised by this library."""


class DomainError(RecalError, ValueError):
    """A numeric argument is outside its valid range."""


class StructuralError(RecalError, ValueError):
    """Inputs that must share structure (supports, lengths) do not."""


class DegenerateClassError(DomainError):
    """A class decomposition would put mass 0 or 1 on class 1."""


class NoRootError(RecalError, RuntimeError):
    """No sign change could be established for a root search.

    ``probed_interval`` holds the widest (lo, hi) interval that was examined.
    """

    def __init__(self, message: str, probed_interval: tuple[float, float] | None = None):
        super().__init__(message)
        self.probed_interval = probed_interval


class InfeasibleError(RecalError, RuntimeError):
    """A moment-matching system has no solution in the admissible range.

    ``attainable_auc_range`` holds the (low, high) AUC values reachable over
    the probed parameter range, so callers can see how far off the target is.
    """

    def __init__(self, message: str, attainable_auc_range: tuple[float, float] | None = None):
        super().__init__(message)
        self.attainable_auc_range = attainable_auc_range


class ScenarioError(RecalError, ValueError):
    """A scenario file is malformed; the message names the offending key."""
