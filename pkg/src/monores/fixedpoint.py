"""Banach fixed-point iteration with the geometric error bound as output.

For a contraction with factor k < 1 the iterates satisfy

    d(x_{n+1}, x_n) <= k^n d(x_1, x_0)
    d(x_n,   x*)    <= k^n / (1 - k) * d(x_1, x_0)

and the second line, the a-priori bound, is tracked alongside the observed
residuals so callers can verify the theory against the run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import EstimateUnavailableError, NonConvergenceError, UsageError
from .linalg import HVector, norm

DEFAULT_WARMUP = 2  # iterations skipped before residual ratios are trusted
DEFAULT_MAX_ITERS = 10_000


@dataclass(frozen=True)
class ContractionMap:
    """A self-map on vectors of fixed dimension, optionally with a claimed
    Lipschitz factor k in [0, 1). ``k_claimed=None`` means unknown."""

    func: Callable[[HVector], HVector]
    k_claimed: Optional[float] = None

    def __post_init__(self):
        k = self.k_claimed
        if k is not None:
            k = float(k)
            if not 0.0 <= k < 1.0:
                raise UsageError(f"claimed contraction factor must be in [0, 1), got {k}")
            object.__setattr__(self, "k_claimed", k)

    def __call__(self, x: HVector) -> HVector:
        y = self.func(x)
        if not isinstance(y, HVector):
            raise UsageError("contraction map must return an HVector")
        if y.dim != x.dim or y.weight != x.weight:
            raise UsageError("contraction map must preserve dimension and weight")
        return y


@dataclass
class IterationReport:
    """Record of one fixed-point run.

    residual_history[m] is ||x_{m+1} - x_m||; apriori_bounds[n] is
    k^n/(1-k) * d(x_1, x_0), indexed by iterate (only when k was claimed).
    """

    iterations: int = 0
    residual_history: list[float] = field(default_factory=list)
    k_estimate: Optional[float] = None
    apriori_bounds: list[float] = field(default_factory=list)
    converged: bool = False

    def csv_rows(self) -> list[tuple[int, float, Optional[float]]]:
        """(iter, residual, apriori_bound) rows; bound is None when unknown."""
        rows = []
        for m, r in enumerate(self.residual_history):
            bound = self.apriori_bounds[m] if m < len(self.apriori_bounds) else None
            rows.append((m, r, bound))
        return rows


def apriori_bound(k: float, d10: float, n: int) -> float:
    """k^n / (1 - k) * d10, the distance bound from the n-th iterate to the
    fixed point given d10 = d(x_1, x_0)."""
    k = float(k)
    d10 = float(d10)
    if not 0.0 <= k < 1.0:
        raise UsageError(f"contraction factor must be in [0, 1), got {k}")
    if d10 < 0.0:
        raise UsageError(f"initial step distance must be nonnegative, got {d10}")
    if n < 0:
        raise UsageError(f"iteration index must be nonnegative, got {n}")
    return k**n * d10 / (1.0 - k)


def estimate_contraction(report: IterationReport, warmup: int = DEFAULT_WARMUP) -> float:
    """Empirical contraction factor: max residual ratio after the warmup.

    Raises EstimateUnavailableError when the history is too short or a
    residual in the window is exactly zero.
    """
    if warmup < 0:
        raise UsageError(f"warmup must be nonnegative, got {warmup}")
    history = report.residual_history
    if len(history) <= warmup + 1:
        raise EstimateUnavailableError(
            f"need more than {warmup + 1} residuals to estimate, have {len(history)}"
        )
    window = history[warmup:]
    if any(r == 0.0 for r in window):
        raise EstimateUnavailableError("zero residual in estimation window")
    return max(window[m + 1] / window[m] for m in range(len(window) - 1))


def iterate(
    map: ContractionMap,
    x0: HVector,
    tol: float,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> tuple[HVector, IterationReport]:
    """Picard iteration x_{m+1} = map(x_m) until the returned point is within
    tol of being fixed.

    Stopping rule: with a claimed factor k the loop ends once the successive
    residual drops below tol*(1-k) or the a-priori bound on the next iterate
    drops below tol; either way the geometric tail estimate certifies true
    error <= tol, and the latest iterate is returned. Without a claimed
    factor the loop ends at plain residual <= tol and returns the iterate
    whose residual was measured.

    Raises NonConvergenceError (carrying the report) after max_iters, which
    usually signals k >= 1 or an unreachable tolerance.
    """
    if not tol > 0.0:
        raise UsageError(f"tolerance must be positive, got {tol}")
    if max_iters < 1:
        raise UsageError(f"max_iters must be at least 1, got {max_iters}")

    k = map.k_claimed
    report = IterationReport()
    x = x0
    d10 = 0.0
    for m in range(max_iters):
        x_next = map(x)
        r = norm(x_next - x)
        report.residual_history.append(r)
        report.iterations = m + 1
        if m == 0:
            d10 = r
            if k is not None:
                report.apriori_bounds.append(apriori_bound(k, d10, 0))
        if k is None:
            if r <= tol:
                _finish(report, converged=True)
                return x, report
        else:
            bound_next = apriori_bound(k, d10, m + 1)
            report.apriori_bounds.append(bound_next)
            if r <= (1.0 - k) * tol or bound_next <= tol:
                _finish(report, converged=True)
                return x_next, report
        x = x_next

    _finish(report, converged=False)
    raise NonConvergenceError(
        f"no convergence to tol={tol} within {max_iters} iterations "
        f"(last residual {report.residual_history[-1]:.3e})",
        diagnostics=report,
    )


def _finish(report: IterationReport, converged: bool) -> None:
    report.converged = converged
    try:
        report.k_estimate = estimate_contraction(report)
    except EstimateUnavailableError:
        report.k_estimate = None
