"""Resolvent solvers: direct solve of (I + lambda*A) u = f and the staged
contraction bootstrap that reaches any positive lambda from a base one.

The bootstrap rests on the identity

    u + lambda*A u = f
        <=>  u = R_base[ (L0/L) f + (1 - L0/L) u ],   R_base = (I + L0*A)^{-1}

whose right-hand side is a contraction with factor |1 - L0/L| as soon as
L > L0/2, because the base resolvent of a monotone operator is
non-expansive. Targets below half the base are reached through a geometric
schedule of intermediate shifts, each stage using the previous shift as its
base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergenceError, NumericalError, UsageError
from .fixedpoint import (
    ContractionMap,
    IterationReport,
    apriori_bound,
    estimate_contraction,
    iterate,
)
from .linalg import HVector, TridiagonalSystem, norm, solve_spd, solve_tridiagonal
from .operators import (
    OperatorSpec,
    ShiftedSystem,
    _check_operand,
    apply,
    assemble_shifted,
    kind_name,
    natural_weight,
)
from .operators import CertificateReport

# How much tighter intermediate stages are solved than the requested
# tolerance; their results only seed the next stage's iteration.
STAGE_TIGHTENING = 0.1

# The final equation residual is allowed this many multiples of
# tol * max(1, ||f||).
RESIDUAL_SAFETY = 10.0


@dataclass(frozen=True)
class ResolventConfig:
    """Target shift, method and iteration controls for resolvent solves.

    ``upward_ratio`` is an optional performance knob for targets above the
    base: instead of one stage with factor 1 - base/lam (which approaches 1
    for lam >> base), climb geometrically by that ratio so every stage's
    factor stays at most 1 - 1/upward_ratio. Off by default.
    """

    lam: float
    method: str = "direct"
    base_lambda: float = 1.0
    stage_ratio: float = 2.0 / 3.0
    tol: float = 1e-10
    max_iters: int = 10_000
    upward_ratio: float | None = None

    def __post_init__(self):
        lam = float(self.lam)
        if not (math.isfinite(lam) and lam > 0.0):
            raise UsageError(f"lambda must be positive and finite, got {lam}")
        if self.method not in ("direct", "bootstrap"):
            raise UsageError(f"method must be 'direct' or 'bootstrap', got {self.method!r}")
        base = float(self.base_lambda)
        if not (math.isfinite(base) and base > 0.0):
            raise UsageError(f"base lambda must be positive and finite, got {base}")
        ratio = float(self.stage_ratio)
        if not 0.5 < ratio < 1.0:
            raise UsageError(
                f"stage ratio must lie strictly between 1/2 and 1, got {ratio}"
            )
        if not (math.isfinite(self.tol) and self.tol > 0.0):
            raise UsageError(f"tolerance must be positive, got {self.tol}")
        if int(self.max_iters) < 1:
            raise UsageError(f"max_iters must be at least 1, got {self.max_iters}")
        up = self.upward_ratio
        if up is not None:
            up = float(up)
            if not (math.isfinite(up) and up > 1.0):
                raise UsageError(f"upward ratio must exceed 1, got {up}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "base_lambda", base)
        object.__setattr__(self, "stage_ratio", ratio)
        object.__setattr__(self, "tol", float(self.tol))
        object.__setattr__(self, "max_iters", int(self.max_iters))
        object.__setattr__(self, "upward_ratio", up)


@dataclass
class BootstrapStage:
    lam: float
    factor: float
    report: IterationReport


@dataclass
class BootstrapTrace:
    """Per-stage record of a bootstrap solve."""

    stages: list[BootstrapStage] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "stages": [
                {
                    "lambda": s.lam,
                    "factor": s.factor,
                    "iterations": s.report.iterations,
                    "final_residual": (
                        s.report.residual_history[-1] if s.report.residual_history else 0.0
                    ),
                }
                for s in self.stages
            ]
        }


def _solve_system(system: ShiftedSystem, f: HVector) -> HVector:
    if isinstance(system, TridiagonalSystem):
        return solve_tridiagonal(system, f)
    arr = np.asarray(system, dtype=float)
    if arr.ndim == 1:
        if np.any(arr == 0.0):
            raise NumericalError("shifted diagonal system is singular")
        u = f.coeffs / arr
        if not np.all(np.isfinite(u)):
            raise NumericalError("diagonal solve overflowed")
        return f.with_coeffs(u)
    asym = float(np.max(np.abs(arr - arr.T)))
    if asym <= 1e-12:
        return solve_spd(arr, f)
    try:
        u = np.linalg.solve(arr, f.coeffs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"dense solve broke down: {exc}") from exc
    if not np.all(np.isfinite(u)):
        raise NumericalError("dense solve produced non-finite entries")
    return f.with_coeffs(u)


def resolve_direct(op: OperatorSpec, lam: float, f: HVector) -> HVector:
    """u = (I + lam*A)^{-1} f by the solver matching the assembled form:
    componentwise for diagonal systems, Thomas sweep for tridiagonal
    stencils, Cholesky (or LU when non-symmetric) for dense systems."""
    _check_operand(op, f)
    return _solve_system(assemble_shifted(op, lam), f)


def equation_residual(op: OperatorSpec, lam: float, f: HVector, u: HVector) -> float:
    """||u + lam * A u - f||, the defect of a candidate resolvent value."""
    return norm(u + float(lam) * apply(op, u) - f)


def bootstrap_map(
    op: OperatorSpec, base_lambda: float, lam: float, f: HVector, u: HVector
) -> HVector:
    """One application of the stage map

        T(u) = (I + base*A)^{-1} [ (base/lam) f + (1 - base/lam) u ]

    whose fixed point is the resolvent of f at the target lam."""
    base_lambda = float(base_lambda)
    lam = float(lam)
    if not (math.isfinite(base_lambda) and base_lambda > 0.0):
        raise UsageError(f"base lambda must be positive and finite, got {base_lambda}")
    if not (math.isfinite(lam) and lam > 0.0):
        raise UsageError(f"lambda must be positive and finite, got {lam}")
    a = base_lambda / lam
    return resolve_direct(op, base_lambda, a * f + (1.0 - a) * u)


def stage_schedule(base_lambda: float, target_lambda: float, ratio: float) -> list[float]:
    """Shift schedule from base to target.

    Upward targets need a single stage (the factor |1 - base/target| is
    already below one). Downward targets descend geometrically by `ratio`
    until the target is within reach, then clamp: every consecutive pair
    keeps next > prev/2, the strict-contraction condition.
    """
    base = float(base_lambda)
    target = float(target_lambda)
    ratio = float(ratio)
    if not 0.5 < ratio < 1.0:
        raise UsageError(f"stage ratio must lie strictly between 1/2 and 1, got {ratio}")
    if not (math.isfinite(base) and base > 0.0):
        raise UsageError(f"base lambda must be positive and finite, got {base}")
    if not (math.isfinite(target) and target > 0.0):
        raise UsageError(f"target lambda must be positive and finite, got {target}")
    if target >= base:
        return [target]
    stages: list[float] = []
    current = base
    while target <= 0.5 * current:
        current *= ratio
        stages.append(current)
    stages.append(target)
    return stages


def _upward_schedule(base: float, target: float, up: float) -> list[float]:
    """Climbing schedule: geometric stages by factor `up` keep every stage's
    contraction factor at 1 - 1/up instead of approaching 1."""
    stages: list[float] = []
    current = base
    while current * up < target:
        current *= up
        stages.append(current)
    stages.append(target)
    return stages


def _merge_reports(first: IterationReport, second: IterationReport, k: float) -> IterationReport:
    """Concatenate two runs of the same Picard sequence into one report.

    Restarting the iteration from its own latest iterate continues the
    sequence exactly, so histories join seamlessly and the a-priori bounds
    can be rebuilt from the merged first step.
    """
    merged = IterationReport(
        iterations=first.iterations + second.iterations,
        residual_history=first.residual_history + second.residual_history,
        converged=second.converged,
    )
    if merged.residual_history:
        d10 = merged.residual_history[0]
        merged.apriori_bounds = [
            apriori_bound(k, d10, n) for n in range(merged.iterations + 1)
        ]
    try:
        merged.k_estimate = estimate_contraction(merged)
    except Exception:
        merged.k_estimate = None
    return merged


def resolve_bootstrap(
    op: OperatorSpec, f: HVector, cfg: ResolventConfig
) -> tuple[HVector, BootstrapTrace]:
    """Resolvent at cfg.lam built by staged contraction from cfg.base_lambda.

    Each stage solves the fixed-point equation with the previous shift as
    base, claimed factor |1 - prev/stage|, warm-started from the stage
    before. Intermediate stages run at a tightened tolerance since they
    only seed the next stage; the final stage is continued, tightening
    further as needed, until the equation residual
    ||u + lam*A u - f|| falls within RESIDUAL_SAFETY * tol * max(1, ||f||).

    Non-monotone kinds are rejected: without monotonicity the base
    resolvent need not be non-expansive and the factor claim is void (use
    resolve_direct).
    """
    if cfg.method != "bootstrap":
        raise UsageError(f"config method must be 'bootstrap', got {cfg.method!r}")
    if not op.monotone_expected:
        raise UsageError(
            f"bootstrap requires a monotone kind, {kind_name(op)} is not; use resolve_direct"
        )
    _check_operand(op, f)

    trace = BootstrapTrace()
    if norm(f) == 0.0:
        return HVector.zeros(f.dim, f.weight), trace

    f_scale = max(1.0, norm(f))
    residual_target = cfg.tol * f_scale
    if cfg.upward_ratio is not None and cfg.lam > cfg.base_lambda:
        schedule = _upward_schedule(cfg.base_lambda, cfg.lam, cfg.upward_ratio)
    else:
        schedule = stage_schedule(cfg.base_lambda, cfg.lam, cfg.stage_ratio)

    u = HVector.zeros(f.dim, f.weight)
    lam_prev = cfg.base_lambda
    for index, lam_stage in enumerate(schedule):
        final_stage = index == len(schedule) - 1
        a = lam_prev / lam_stage
        b = 1.0 - a
        k = abs(b)
        base_system = assemble_shifted(op, lam_prev)
        stage_map = ContractionMap(
            lambda v, _a=a, _b=b, _sys=base_system: _solve_system(_sys, _a * f + _b * v),
            k_claimed=k,
        )
        tol_stage = cfg.tol if final_stage else cfg.tol * STAGE_TIGHTENING
        try:
            u, report = iterate(stage_map, u, tol_stage, cfg.max_iters)
        except NonConvergenceError as exc:
            trace.stages.append(BootstrapStage(lam_stage, k, exc.diagnostics))
            raise NonConvergenceError(
                f"bootstrap stage at lambda={lam_stage} did not converge", trace
            ) from exc

        if final_stage:
            # The fixed-point tolerance controls ||u - u*||; the equation
            # residual picks up a factor of roughly 1 + lam * mu on the
            # slowest mode, so keep iterating with a tighter tolerance
            # until the defect itself is small enough.
            floor = 100.0 * np.finfo(float).eps * f_scale
            while equation_residual(op, lam_stage, f, u) > residual_target and tol_stage > floor:
                tol_stage *= 0.1
                u, continuation = iterate(stage_map, u, tol_stage, cfg.max_iters)
                report = _merge_reports(report, continuation, k)
            defect = equation_residual(op, lam_stage, f, u)
            if defect > RESIDUAL_SAFETY * residual_target:
                trace.stages.append(BootstrapStage(lam_stage, k, report))
                raise NonConvergenceError(
                    f"final equation residual {defect:.3e} exceeds "
                    f"{RESIDUAL_SAFETY * residual_target:.3e}",
                    trace,
                )
        trace.stages.append(BootstrapStage(lam_stage, k, report))
        lam_prev = lam_stage
    return u, trace


def resolve(op: OperatorSpec, f: HVector, cfg: ResolventConfig) -> tuple[HVector, BootstrapTrace | None]:
    """Dispatch on cfg.method; the trace is None for direct solves."""
    if cfg.method == "direct":
        return resolve_direct(op, cfg.lam, f), None
    u, trace = resolve_bootstrap(op, f, cfg)
    return u, trace


def nonexpansiveness_certificate(
    op: OperatorSpec, lambdas: list[float], samples: int, seed: int
) -> CertificateReport:
    """Probe ||(I + lambda*A)^{-1} f|| <= ||f|| on random f for every lambda.

    worst_value is the largest ratio observed; the witness is the f
    achieving it, with the offending lambda recorded in params.
    """
    if not op.monotone_expected:
        raise UsageError(
            f"non-expansiveness requires a monotone kind, {kind_name(op)} is not"
        )
    if samples < 1:
        raise UsageError("non-expansiveness certificate needs samples >= 1")
    lambdas = [float(l) for l in lambdas]
    if not lambdas or any(not (math.isfinite(l) and l > 0.0) for l in lambdas):
        raise UsageError("lambdas must be a non-empty list of positive reals")

    w = natural_weight(op)
    rng = np.random.default_rng(seed)
    worst_value = -math.inf
    witness = None
    lam_worst = lambdas[0]
    evaluated = 0
    for _ in range(samples):
        f = HVector(rng.standard_normal(op.dim), w)
        nf = norm(f)
        if nf == 0.0:
            continue  # zero draws would make the ratio 0/0
        for lam in lambdas:
            ratio = norm(resolve_direct(op, lam, f)) / nf
            evaluated += 1
            if ratio > worst_value:
                worst_value = ratio
                witness = f
                lam_worst = lam
    if witness is None:
        raise UsageError("no nonzero sample vectors were drawn")
    return CertificateReport(
        property="non-expansiveness",
        samples=evaluated,
        worst_value=worst_value,
        witness=witness,
        verdict=worst_value <= 1.0 + 1e-10,
        params={"lambda": lam_worst},
    )
