"""Exception and warning types shared across the package."""


class ValidationError(ValueError):
    """A state, operation, or parameter violates its documented contract."""


class FileFormatError(ValueError):
    """A state or protocol file does not match the documented JSON schema."""


class ConvergenceError(RuntimeError):
    """An iterative routine failed to converge; carries any partial protocol."""

    def __init__(self, message, steps=None):
        super().__init__(message)
        self.steps = steps if steps is not None else []


class TruncationError(RuntimeError):
    """A truncated Fock-space computation has too much population at the cutoff."""


class TruncationWarning(UserWarning):
    """Tail population near the Fock cutoff is large enough to bias results."""


class OptimalityWarning(UserWarning):
    """A certified energy differs from the spectral bound by more than expected."""


class BudgetWarning(RuntimeWarning):
    """A search budget ran out; the reported value is best-so-far."""
