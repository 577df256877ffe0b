class DSimonError(Exception):
    """Base class for failures specific to this package."""


class PromiseViolationError(DSimonError):
    """A function table (or oracle set) breaks the Simon promise."""


class BudgetExhaustedError(DSimonError):
    """The solver hit ``max_runs`` without a verified answer.

    ``report`` carries the partial run, including the basis rank reached.
    """

    def __init__(self, message, report=None, basis=None):
        super().__init__(message)
        self.report = report
        self.basis = basis


class SimulationIntegrityError(DSimonError):
    """Amplitude leaked outside the subspace the circuit must return to."""


class TableFormatError(DSimonError, ValueError):
    """A truth-table file could not be parsed."""
