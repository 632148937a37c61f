"""Catalog of concrete linear operators and executable property certificates.

Unbounded operators are represented by their n-dimensional truncations;
unboundedness shows up as growth of the norms with n (see
``unboundedness_probe``), never as an infinite object. In finite dimension
every operator here acts on the whole space, so domains survive only as
documentation.

Kinds and their JSON encodings (``{"kind": <string>, "params": {...}}``):

    spd_matrix      params {"entries": [[...], ...]}      symmetric dense
    diagonal        params {"weights": [...]}              (A u)_n = w_n u_n
    multiplication  params {"samples": [...]}              (A u)_j = g_j u_j
    right_shift     params {"dim": n}                      (A u) = (0, u_1, ..., u_{n-1})
    laplacian_1d    params {"n": n}                        second-difference stencil / h^2
    laplacian_2d    params {"nx": nx, "ny": ny}            5-point stencil on the unit square
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import UsageError
from .linalg import HVector, TridiagonalSystem, inner_product, norm

CERT_PASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpdMatrix:
    """Dense symmetric matrix; the canonical finite-dimensional monotone operator."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise UsageError(f"spd_matrix entries must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise UsageError("spd_matrix entries must be finite")
        asym = float(np.max(np.abs(m - m.T)))
        if asym > 1e-12:
            raise UsageError(f"spd_matrix entries not symmetric (max skew {asym:.3e})")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def monotone_expected(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class Diagonal:
    """(A u)_n = w_n u_n. The default family w_n = n truncates the classic
    unbounded diagonal operator on square-summable sequences."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True).reshape(-1)
        if w.size < 1:
            raise UsageError("diagonal operator needs at least one weight")
        if not np.all(np.isfinite(w)):
            raise UsageError("diagonal weights must be finite")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @staticmethod
    def default(n: int) -> "Diagonal":
        """Weights 1, 2, ..., n."""
        if n < 1:
            raise UsageError("default diagonal needs n >= 1")
        return Diagonal(np.arange(1, n + 1, dtype=float))

    @property
    def dim(self) -> int:
        return self.weights.size

    @property
    def monotone_expected(self) -> bool:
        return bool(np.all(self.weights >= 0.0))


@dataclass(frozen=True, eq=False)
class Multiplication:
    """Pointwise multiplication by samples of a function g at grid nodes."""

    samples: np.ndarray

    def __post_init__(self):
        g = np.array(self.samples, dtype=float, copy=True).reshape(-1)
        if g.size < 1:
            raise UsageError("multiplication operator needs at least one sample")
        if not np.all(np.isfinite(g)):
            raise UsageError("multiplication samples must be finite")
        g.flags.writeable = False
        object.__setattr__(self, "samples", g)

    @property
    def dim(self) -> int:
        return self.samples.size

    @property
    def monotone_expected(self) -> bool:
        return bool(np.all(self.samples >= 0.0))


@dataclass(frozen=True, eq=False)
class RightShift:
    """Truncated right shift (0, u_1, ..., u_{n-1}); the last coefficient is
    dropped so the truncation stays an endomorphism. Still an isometry on
    vectors whose last coordinate vanishes."""

    dim_: int

    def __post_init__(self):
        n = int(self.dim_)
        if n < 1:
            raise UsageError("right shift needs dimension >= 1")
        object.__setattr__(self, "dim_", n)

    @property
    def dim(self) -> int:
        return self.dim_

    @property
    def monotone_expected(self) -> bool:
        return False


@dataclass(frozen=True, eq=False)
class Laplacian1D:
    """Second-difference operator on n interior nodes of (0,1), zero boundary.

    (A u)_j = (-u_{j-1} + 2 u_j - u_{j+1}) / h^2 with h = 1/(n+1) and zero
    ghost values; grid vectors carry inner-product weight h.
    """

    n: int

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise UsageError("laplacian_1d needs n >= 1")
        object.__setattr__(self, "n", n)

    @property
    def h(self) -> float:
        return 1.0 / (self.n + 1)

    @property
    def dim(self) -> int:
        return self.n

    @property
    def monotone_expected(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class Laplacian2D:
    """5-point stencil on an nx-by-ny interior grid of the unit square.

    Coefficients are stored row-major with x fastest: index = iy*nx + ix.
    Grid vectors carry inner-product weight hx*hy.
    """

    nx: int
    ny: int

    def __post_init__(self):
        nx, ny = int(self.nx), int(self.ny)
        if nx < 1 or ny < 1:
            raise UsageError("laplacian_2d needs nx >= 1 and ny >= 1")
        object.__setattr__(self, "nx", nx)
        object.__setattr__(self, "ny", ny)

    @property
    def hx(self) -> float:
        return 1.0 / (self.nx + 1)

    @property
    def hy(self) -> float:
        return 1.0 / (self.ny + 1)

    @property
    def dim(self) -> int:
        return self.nx * self.ny

    @property
    def monotone_expected(self) -> bool:
        return True


OperatorSpec = Union[SpdMatrix, Diagonal, Multiplication, RightShift, Laplacian1D, Laplacian2D]

_KIND_NAMES = {
    SpdMatrix: "spd_matrix",
    Diagonal: "diagonal",
    Multiplication: "multiplication",
    RightShift: "right_shift",
    Laplacian1D: "laplacian_1d",
    Laplacian2D: "laplacian_2d",
}


def kind_name(op: OperatorSpec) -> str:
    return _KIND_NAMES[type(op)]


def natural_weight(op: OperatorSpec) -> float:
    """Inner-product weight of the space the operator naturally acts on."""
    if isinstance(op, Laplacian1D):
        return op.h
    if isinstance(op, Laplacian2D):
        return op.hx * op.hy
    return 1.0


def operator_to_json(op: OperatorSpec) -> dict:
    if isinstance(op, SpdMatrix):
        params = {"entries": op.entries.tolist()}
    elif isinstance(op, Diagonal):
        params = {"weights": op.weights.tolist()}
    elif isinstance(op, Multiplication):
        params = {"samples": op.samples.tolist()}
    elif isinstance(op, RightShift):
        params = {"dim": op.dim}
    elif isinstance(op, Laplacian1D):
        params = {"n": op.n}
    elif isinstance(op, Laplacian2D):
        params = {"nx": op.nx, "ny": op.ny}
    else:
        raise UsageError(f"unknown operator type {type(op)!r}")
    return {"kind": kind_name(op), "params": params}


def operator_from_json(obj: dict) -> OperatorSpec:
    if not isinstance(obj, dict) or set(obj) != {"kind", "params"}:
        raise UsageError('operator JSON must be {"kind": ..., "params": {...}}')
    kind, params = obj["kind"], obj["params"]
    if not isinstance(params, dict):
        raise UsageError("operator params must be an object")

    def expect_keys(*names):
        if set(params) != set(names):
            raise UsageError(f"operator kind {kind!r} expects params {sorted(names)}")

    if kind == "spd_matrix":
        expect_keys("entries")
        return SpdMatrix(np.asarray(params["entries"], dtype=float))
    if kind == "diagonal":
        expect_keys("weights")
        return Diagonal(np.asarray(params["weights"], dtype=float))
    if kind == "multiplication":
        expect_keys("samples")
        return Multiplication(np.asarray(params["samples"], dtype=float))
    if kind == "right_shift":
        expect_keys("dim")
        return RightShift(int(params["dim"]))
    if kind == "laplacian_1d":
        expect_keys("n")
        return Laplacian1D(int(params["n"]))
    if kind == "laplacian_2d":
        expect_keys("nx", "ny")
        return Laplacian2D(int(params["nx"]), int(params["ny"]))
    raise UsageError(f"unknown operator kind {kind!r}")


def _check_operand(op: OperatorSpec, u: HVector) -> None:
    if u.dim != op.dim:
        raise UsageError(f"operator dimension {op.dim} does not match vector {u.dim}")
    expected = natural_weight(op)
    if isinstance(op, (Laplacian1D, Laplacian2D)) and u.weight != expected:
        raise UsageError(
            f"grid vectors for {kind_name(op)} must carry weight {expected}, got {u.weight}"
        )


def apply(op: OperatorSpec, u: HVector) -> HVector:
    """Apply the operator to a vector; linear in u."""
    _check_operand(op, u)
    x = u.coeffs
    if isinstance(op, SpdMatrix):
        return u.with_coeffs(op.entries @ x)
    if isinstance(op, Diagonal):
        return u.with_coeffs(op.weights * x)
    if isinstance(op, Multiplication):
        return u.with_coeffs(op.samples * x)
    if isinstance(op, RightShift):
        y = np.zeros_like(x)
        y[1:] = x[:-1]
        return u.with_coeffs(y)
    if isinstance(op, Laplacian1D):
        h2 = op.h * op.h
        y = 2.0 * x
        y[1:] -= x[:-1]
        y[:-1] -= x[1:]
        return u.with_coeffs(y / h2)
    if isinstance(op, Laplacian2D):
        g = x.reshape(op.ny, op.nx)
        ax = 1.0 / (op.hx * op.hx)
        ay = 1.0 / (op.hy * op.hy)
        y = 2.0 * (ax + ay) * g
        y[:, 1:] -= ax * g[:, :-1]
        y[:, :-1] -= ax * g[:, 1:]
        y[1:, :] -= ay * g[:-1, :]
        y[:-1, :] -= ay * g[1:, :]
        return u.with_coeffs(y.reshape(-1))
    raise UsageError(f"unknown operator type {type(op)!r}")


# A shifted system is one of: 1-D array of diagonal entries, a banded
# TridiagonalSystem, or a dense 2-D array. resolve_direct dispatches on this.
ShiftedSystem = Union[np.ndarray, TridiagonalSystem]


def assemble_shifted(op: OperatorSpec, lam: float) -> ShiftedSystem:
    """Concrete linear system for I + lam*A, matching ``apply`` exactly.

    The result may be non-symmetric (right shift) or indefinite
    (sign-changing multiplication); choosing a solver is the caller's job.
    """
    lam = float(lam)
    if not (math.isfinite(lam) and lam > 0.0):
        raise UsageError(f"shift lambda must be positive and finite, got {lam}")
    if isinstance(op, Diagonal):
        return 1.0 + lam * op.weights
    if isinstance(op, Multiplication):
        return 1.0 + lam * op.samples
    if isinstance(op, Laplacian1D):
        n, h2 = op.n, op.h * op.h
        off = np.full(n - 1, -lam / h2)
        return TridiagonalSystem(off, np.full(n, 1.0 + 2.0 * lam / h2), off.copy())
    if isinstance(op, SpdMatrix):
        return np.eye(op.dim) + lam * op.entries
    if isinstance(op, RightShift):
        m = np.eye(op.dim)
        if op.dim > 1:
            m += lam * np.diag(np.ones(op.dim - 1), -1)
        return m
    if isinstance(op, Laplacian2D):
        ax = lam / (op.hx * op.hx)
        ay = lam / (op.hy * op.hy)
        tx = 2.0 * np.eye(op.nx) - np.diag(np.ones(op.nx - 1), 1) - np.diag(np.ones(op.nx - 1), -1)
        ty = 2.0 * np.eye(op.ny) - np.diag(np.ones(op.ny - 1), 1) - np.diag(np.ones(op.ny - 1), -1)
        return np.eye(op.dim) + ax * np.kron(np.eye(op.ny), tx) + ay * np.kron(ty, np.eye(op.nx))
    raise UsageError(f"unknown operator type {type(op)!r}")


def apply_system(system: ShiftedSystem, u: HVector) -> HVector:
    """Multiply an assembled system by a vector (consistency checks, residuals)."""
    if isinstance(system, TridiagonalSystem):
        if u.dim != system.dim:
            raise UsageError(f"system dimension {system.dim} does not match vector {u.dim}")
        return u.with_coeffs(system.matvec(u.coeffs))
    arr = np.asarray(system, dtype=float)
    if arr.ndim == 1:
        if u.dim != arr.size:
            raise UsageError(f"system dimension {arr.size} does not match vector {u.dim}")
        return u.with_coeffs(arr * u.coeffs)
    if arr.ndim == 2:
        if u.dim != arr.shape[0]:
            raise UsageError(f"system dimension {arr.shape[0]} does not match vector {u.dim}")
        return u.with_coeffs(arr @ u.coeffs)
    raise UsageError(f"unrecognized system with ndim {arr.ndim}")


@dataclass(frozen=True, eq=False)
class CertificateReport:
    """Outcome of a property sweep, with the worst witness found."""

    property: str
    samples: int
    worst_value: float
    witness: HVector
    verdict: bool
    params: dict | None = None

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "samples": self.samples,
            "worst_value": self.worst_value,
            "verdict": "pass" if self.verdict else "fail",
            "witness": self.witness.to_json(),
            "params": self.params or {},
        }


def rayleigh_quotient(op: OperatorSpec, u: HVector) -> float:
    """<A u, u> / <u, u>; sign certifies monotonicity on the sample."""
    denom = inner_product(u, u)
    if denom == 0.0:
        raise UsageError("Rayleigh quotient of the zero vector is undefined")
    return inner_product(apply(op, u), u) / denom


def monotonicity_certificate(op: OperatorSpec, samples: int, seed: int) -> CertificateReport:
    """Probe <A u, u> >= 0 on random unit vectors plus every canonical basis vector.

    The report's worst_value is the minimal Rayleigh quotient seen; verdict
    passes iff it stays above -1e-12. The witness reproduces worst_value.
    """
    if samples < 1:
        raise UsageError("monotonicity certificate needs samples >= 1")
    w = natural_weight(op)
    rng = np.random.default_rng(seed)
    probes: list[HVector] = []
    for j in range(op.dim):
        probes.append(HVector.basis(j, op.dim, w))
    for _ in range(samples):
        v = rng.standard_normal(op.dim)
        vec = HVector(v, w)
        probes.append((1.0 / norm(vec)) * vec)

    worst_value = math.inf
    witness = probes[0]
    for vec in probes:
        q = rayleigh_quotient(op, vec)
        if q < worst_value:
            worst_value = q
            witness = vec
    return CertificateReport(
        property="monotonicity",
        samples=len(probes),
        worst_value=worst_value,
        witness=witness,
        verdict=worst_value >= -CERT_PASS_TOL,
    )


def _apply_adjoint(op: OperatorSpec, u: HVector) -> HVector:
    """Adjoint action in the weighted inner product (uniform weights: transpose)."""
    if isinstance(op, RightShift):
        y = np.zeros_like(u.coeffs)
        y[:-1] = u.coeffs[1:]
        return u.with_coeffs(y)
    return apply(op, u)  # every other kind is symmetric


def operator_norm_estimate(op: OperatorSpec, iters: int) -> float:
    """Power iteration on A^T A; a lower bound on ||A||, nondecreasing in iters.

    The start vector is a fixed-seed pseudo-random vector, so the estimate
    is deterministic and never starts from zero.
    """
    if iters < 1:
        raise UsageError("operator norm estimate needs iters >= 1")
    w = natural_weight(op)
    x = HVector(np.random.default_rng(0).standard_normal(op.dim), w)
    estimate = 0.0
    for _ in range(iters):
        nx = norm(x)
        if nx == 0.0:
            break
        ax = apply(op, x)
        estimate = norm(ax) / nx
        y = _apply_adjoint(op, ax)
        ny = norm(y)
        if ny == 0.0:
            break  # A^T A annihilated the iterate; current bound is final
        x = (1.0 / ny) * y
    return estimate


def unboundedness_probe(max_n: int) -> list[tuple[int, float]]:
    """Growth table ||A e_n|| / ||e_n|| = n for the default diagonal family.

    Each row probes the n-dimensional truncation at its last basis vector;
    the ratios grow without bound, exhibiting unboundedness of the limit.
    """
    if max_n < 1:
        raise UsageError("unboundedness probe needs max_n >= 1")
    rows: list[tuple[int, float]] = []
    for n in range(1, max_n + 1):
        op = Diagonal.default(n)
        e_n = HVector.basis(n - 1, n)
        rows.append((n, norm(apply(op, e_n)) / norm(e_n)))
    return rows


def laplacian_eigenpair(n: int, mode: int) -> tuple[HVector, float]:
    """Discrete sine eigenpair of the 1-D stencil: v_j = sin(mode*pi*j*h),
    mu = (2 - 2*cos(mode*pi*h)) / h^2."""
    n, mode = int(n), int(mode)
    if n < 1:
        raise UsageError("laplacian_eigenpair needs n >= 1")
    if not 1 <= mode <= n:
        raise UsageError(f"mode {mode} out of range 1..{n}")
    h = 1.0 / (n + 1)
    j = np.arange(1, n + 1)
    v = np.sin(mode * math.pi * j * h)
    mu = (2.0 - 2.0 * math.cos(mode * math.pi * h)) / (h * h)
    return HVector(v, h), mu
