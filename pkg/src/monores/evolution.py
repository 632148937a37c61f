"""Implicit-Euler evolution u' + A u = 0 driven by resolvent steps.

One backward step of size tau is exactly one resolvent application,
u_{k+1} = (I + tau*A)^{-1} u_k, so for monotone operators every step is
non-expansive and trajectory norms never grow. A discrete sine-basis
solver for the 1-D stencil provides the exact semidiscrete flow as an
accuracy oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import UsageError
from .linalg import HVector, norm
from .operators import Laplacian1D, OperatorSpec, kind_name, laplacian_eigenpair
from .resolvent import ResolventConfig, resolve_bootstrap, resolve_direct


@dataclass(frozen=True)
class FlowConfig:
    """Step size, step count, and the resolvent settings used per step.

    The resolvent config's own lam is ignored; each step solves at
    lam = tau.
    """

    tau: float
    steps: int
    resolvent: ResolventConfig | None = None

    def __post_init__(self):
        tau = float(self.tau)
        if not (math.isfinite(tau) and tau > 0.0):
            raise UsageError(f"time step must be positive and finite, got {tau}")
        steps = int(self.steps)
        if steps < 1:
            raise UsageError(f"step count must be at least 1, got {steps}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "steps", steps)


@dataclass
class Trajectory:
    """States, norms and times of one implicit-Euler run; states[0] is u0."""

    states: list[HVector]
    norms: list[float]
    times: list[float]

    def csv_rows(self) -> list[tuple[int, float, float]]:
        return [(k, self.times[k], self.norms[k]) for k in range(len(self.states))]


def implicit_euler_step(
    op: OperatorSpec, tau: float, u: HVector, cfg: ResolventConfig | None = None
) -> HVector:
    """One backward step (I + tau*A)^{-1} u via the configured method."""
    tau = float(tau)
    if not (math.isfinite(tau) and tau > 0.0):
        raise UsageError(f"time step must be positive and finite, got {tau}")
    if not op.monotone_expected:
        raise UsageError(f"implicit Euler stepping requires a monotone kind, not {kind_name(op)}")
    if cfg is not None and cfg.method == "bootstrap":
        step_cfg = replace(cfg, lam=tau)
        v, _ = resolve_bootstrap(op, u, step_cfg)
        return v
    return resolve_direct(op, tau, u)


def evolve(op: OperatorSpec, flow: FlowConfig, u0: HVector) -> Trajectory:
    """Run flow.steps implicit-Euler steps from u0."""
    states = [u0]
    norms = [norm(u0)]
    times = [0.0]
    u = u0
    for k in range(1, flow.steps + 1):
        u = implicit_euler_step(op, flow.tau, u, flow.resolvent)
        states.append(u)
        norms.append(norm(u))
        times.append(k * flow.tau)
    return Trajectory(states, norms, times)


def spectral_exact_flow(n: int, u0: HVector, t: float) -> HVector:
    """Exact semidiscrete heat flow for the 1-D stencil on n interior nodes.

    Expands u0 in the discrete sine eigenbasis and damps each coefficient
    by exp(-t * mu_m); this is the matrix exponential applied to u0 and
    isolates time-stepping error when compared with ``evolve``.
    """
    n = int(n)
    if n < 1:
        raise UsageError("spectral flow needs n >= 1")
    op = Laplacian1D(n)
    if u0.dim != n:
        raise UsageError(f"initial state has dimension {u0.dim}, expected {n}")
    if u0.weight != op.h:
        raise UsageError(f"grid vectors carry weight {op.h}, got {u0.weight}")
    t = float(t)
    if not math.isfinite(t):
        raise UsageError(f"time must be finite, got {t}")

    h = op.h
    j = np.arange(1, n + 1)
    sine = np.sin(math.pi * h * np.outer(j, j))  # symmetric, sine[m-1, j-1]
    mu = np.array([laplacian_eigenpair(n, m)[1] for m in range(1, n + 1)])
    # <v_m, v_m> = h*(n+1)/2 = 1/2 for every mode, so coefficients are 2h * (S u0).
    coeff = 2.0 * h * (sine @ u0.coeffs)
    damped = coeff * np.exp(-t * mu)
    return HVector(sine @ damped, h)
