"""Exception hierarchy shared by every module."""


class SpinFieldError(Exception):
    """Base class for all package errors."""


class DomainError(SpinFieldError, ValueError):
    """An argument lies outside the domain of a physical formula."""


class UsageError(SpinFieldError, ValueError):
    """Inputs are inconsistent with each other (grid mismatch, bad kind, ...)."""


class DegenerateInputError(SpinFieldError, ValueError):
    """Input carries no usable information, e.g. an all-zero field."""


class DegeneratePhaseError(SpinFieldError, ValueError):
    """Phase requested at points where the amplitude vanishes."""

    def __init__(self, indices):
        self.indices = [int(i) for i in indices]
        shown = self.indices[:10]
        more = "" if len(self.indices) <= 10 else f" (+{len(self.indices) - 10} more)"
        super().__init__(f"phase undefined at zero-amplitude grid indices {shown}{more}")


class InstabilityError(SpinFieldError, ArithmeticError):
    """Time integration produced non-finite values."""


class ConvergenceError(SpinFieldError, RuntimeError):
    """An iterative solver failed to converge; ``diagnostics`` has details."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
