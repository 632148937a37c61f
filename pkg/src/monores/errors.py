"""Exception hierarchy shared by all monores modules.

The CLI maps these onto exit codes: UsageError -> 2, NumericalError
(including NonConvergenceError) -> 3.
"""

from __future__ import annotations


class UsageError(ValueError):
    """Caller violated a documented precondition (bad shapes, ranges, flags)."""


class NumericalError(ArithmeticError):
    """A solver broke down: zero pivot, non-positive-definite factorization."""


class NonConvergenceError(NumericalError):
    """Iteration failed to reach the requested tolerance.

    Carries the diagnostic object produced so far (an IterationReport for
    plain fixed-point runs, a BootstrapTrace for staged resolvent runs).
    """

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class EstimateUnavailableError(RuntimeError):
    """Contraction-factor estimate cannot be formed from the given history."""
