"""Weighted coefficient vectors, direct solvers and subspace operations.

Vectors carry a single positive inner-product weight so that plain
truncated sequence spaces (weight 1) and uniform-grid functions on (0,1)
(weight h = 1/(n+1)) share one representation:

    <u, v> = weight * sum_j u_j * v_j

All types are immutable after construction and every operation is a pure
function, so concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import NumericalError, UsageError

# Norm below which a vector is treated as linearly dependent after
# projection (rank detection in Gram-Schmidt). Stated once, reused
# everywhere.
RANK_DROP_TOL = 1e-10

# Absolute symmetry slack accepted by the dense SPD solver.
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HVector:
    """Element of a discretized Hilbert space: coefficients plus weight."""

    coeffs: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float, copy=True).reshape(-1)
        if arr.size < 1:
            raise UsageError("HVector needs at least one coefficient")
        if not np.all(np.isfinite(arr)):
            raise UsageError("HVector coefficients must be finite")
        w = float(self.weight)
        if not (math.isfinite(w) and w > 0.0):
            raise UsageError(f"HVector weight must be positive and finite, got {w}")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "weight", w)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    @staticmethod
    def zeros(dim: int, weight: float = 1.0) -> "HVector":
        return HVector(np.zeros(dim), weight)

    @staticmethod
    def basis(index: int, dim: int, weight: float = 1.0) -> "HVector":
        """Canonical basis vector e_index (0-based) in the given dimension."""
        if not 0 <= index < dim:
            raise UsageError(f"basis index {index} out of range for dim {dim}")
        c = np.zeros(dim)
        c[index] = 1.0
        return HVector(c, weight)

    def _check_compatible(self, other: "HVector") -> None:
        if self.dim != other.dim:
            raise UsageError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if self.weight != other.weight:
            raise UsageError(f"weight mismatch: {self.weight} vs {other.weight}")

    def __add__(self, other: "HVector") -> "HVector":
        self._check_compatible(other)
        return HVector(self.coeffs + other.coeffs, self.weight)

    def __sub__(self, other: "HVector") -> "HVector":
        self._check_compatible(other)
        return HVector(self.coeffs - other.coeffs, self.weight)

    def __mul__(self, scalar: float) -> "HVector":
        return HVector(self.coeffs * float(scalar), self.weight)

    __rmul__ = __mul__

    def __neg__(self) -> "HVector":
        return HVector(-self.coeffs, self.weight)

    def with_coeffs(self, coeffs) -> "HVector":
        """New vector with the same weight and the given coefficients."""
        return HVector(coeffs, self.weight)

    def to_json(self) -> dict:
        return {"weight": self.weight, "coeffs": self.coeffs.tolist()}

    @staticmethod
    def from_json(obj: dict) -> "HVector":
        if not isinstance(obj, dict) or set(obj) != {"weight", "coeffs"}:
            raise UsageError('HVector JSON must be {"weight": ..., "coeffs": [...]}')
        return HVector(np.asarray(obj["coeffs"], dtype=float), float(obj["weight"]))


def inner_product(u: HVector, v: HVector) -> float:
    """Weighted inner product weight * sum_j u_j v_j; symmetric, bilinear."""
    u._check_compatible(v)
    return u.weight * float(np.dot(u.coeffs, v.coeffs))


def norm(u: HVector) -> float:
    """sqrt(<u, u>); zero exactly for the zero vector."""
    return math.sqrt(u.weight) * float(np.linalg.norm(u.coeffs))


@dataclass(frozen=True, eq=False)
class TridiagonalSystem:
    """Tridiagonal matrix stored by bands, strictly diagonally dominant.

    Every system the package constructs (shifted stencils I + lambda*A)
    satisfies |diag_j| > |sub| + |sup| at each row; violation at
    construction is a usage error.
    """

    sub: np.ndarray   # length n-1, below the diagonal
    diag: np.ndarray  # length n
    sup: np.ndarray   # length n-1, above the diagonal

    def __post_init__(self):
        sub = np.array(self.sub, dtype=float, copy=True).reshape(-1)
        diag = np.array(self.diag, dtype=float, copy=True).reshape(-1)
        sup = np.array(self.sup, dtype=float, copy=True).reshape(-1)
        n = diag.size
        if n < 1:
            raise UsageError("tridiagonal system needs at least one row")
        if sub.size != n - 1 or sup.size != n - 1:
            raise UsageError(
                f"band lengths {sub.size}/{sup.size} inconsistent with diagonal length {n}"
            )
        for band in (sub, diag, sup):
            if not np.all(np.isfinite(band)):
                raise UsageError("tridiagonal bands must be finite")
        off = np.zeros(n)
        if n > 1:
            off[1:] += np.abs(sub)
            off[:-1] += np.abs(sup)
        if not np.all(np.abs(diag) > off):
            row = int(np.argmin(np.abs(diag) - off))
            raise UsageError(f"strict diagonal dominance violated at row {row}")
        for name, band in (("sub", sub), ("diag", diag), ("sup", sup)):
            band.flags.writeable = False
            object.__setattr__(self, name, band)

    @property
    def dim(self) -> int:
        return self.diag.size

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        if self.dim > 1:
            y[1:] += self.sub * x[:-1]
            y[:-1] += self.sup * x[1:]
        return y

    def dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        if self.dim > 1:
            m += np.diag(self.sub, -1) + np.diag(self.sup, 1)
        return m


def solve_tridiagonal(sys: TridiagonalSystem, f: HVector) -> HVector:
    """Thomas algorithm: solve sys * u = f in O(n).

    Diagonal dominance guarantees nonzero pivots; they are still checked
    and a breakdown raises NumericalError.
    """
    n = sys.dim
    if f.dim != n:
        raise UsageError(f"system dimension {n} does not match vector {f.dim}")
    # Plain Python floats in the sweep: faster than per-element ndarray access.
    sub = sys.sub.tolist()
    diag = sys.diag.tolist()
    sup = sys.sup.tolist()
    rhs = f.coeffs.tolist()

    c_prime = [0.0] * n
    d_prime = [0.0] * n
    piv = diag[0]
    if piv == 0.0:
        raise NumericalError("zero pivot in tridiagonal elimination at row 0")
    c_prime[0] = sup[0] / piv if n > 1 else 0.0
    d_prime[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - sub[i - 1] * c_prime[i - 1]
        if piv == 0.0:
            raise NumericalError(f"zero pivot in tridiagonal elimination at row {i}")
        if i < n - 1:
            c_prime[i] = sup[i] / piv
        d_prime[i] = (rhs[i] - sub[i - 1] * d_prime[i - 1]) / piv

    u = [0.0] * n
    u[n - 1] = d_prime[n - 1]
    for i in range(n - 2, -1, -1):
        u[i] = d_prime[i] - c_prime[i] * u[i + 1]
    return f.with_coeffs(u)


def solve_spd(matrix: np.ndarray, f: HVector) -> HVector:
    """Solve M u = f for dense symmetric positive definite M via Cholesky.

    Direct factorization keeps the result deterministic, which matters when
    this solver acts as the oracle side of a comparison.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise UsageError(f"matrix must be square, got shape {m.shape}")
    if m.shape[0] != f.dim:
        raise UsageError(f"matrix dimension {m.shape[0]} does not match vector {f.dim}")
    if not np.all(np.isfinite(m)):
        raise UsageError("matrix entries must be finite")
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asym > SYMMETRY_TOL:
        raise UsageError(f"matrix is not symmetric (max |M - M^T| = {asym:.3e})")
    try:
        factor = scipy.linalg.cho_factor(m, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"Cholesky factorization broke down: {exc}") from exc
    u = scipy.linalg.cho_solve(factor, f.coeffs, check_finite=False)
    return f.with_coeffs(u)


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """A list of vectors with shared dimension and weight spanning a subspace.

    May be empty (the trivial subspace {0}), e.g. after orthonormalization
    drops every dependent vector.
    """

    vectors: tuple

    def __post_init__(self):
        vecs = tuple(self.vectors)
        for v in vecs:
            if not isinstance(v, HVector):
                raise UsageError("SubspaceBasis holds HVector entries only")
        if vecs:
            first = vecs[0]
            for v in vecs[1:]:
                first._check_compatible(v)
        object.__setattr__(self, "vectors", vecs)

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def dim(self) -> int:
        if not self.vectors:
            raise UsageError("empty basis has no ambient dimension")
        return self.vectors[0].dim


def orthonormalize(basis: SubspaceBasis) -> SubspaceBasis:
    """Modified Gram-Schmidt with reorthogonalization and rank detection.

    Vectors whose norm falls below RANK_DROP_TOL after projection are
    dropped; the result spans the same subspace and is orthonormal in the
    weighted inner product to within 1e-12.
    """
    if len(basis) == 0:
        raise UsageError("orthonormalize requires a non-empty basis")
    result: list[HVector] = []
    for v in basis.vectors:
        w = v
        for _ in range(2):  # second pass scrubs round-off from the first
            for q in result:
                w = w - inner_product(w, q) * q
        length = norm(w)
        if length > RANK_DROP_TOL:
            result.append((1.0 / length) * w)
    return SubspaceBasis(tuple(result))


def complement_dimension(basis: SubspaceBasis, ambient_dim: int) -> int:
    """dim of the orthogonal complement: ambient_dim - rank(basis).

    Returns 0 exactly when the span is the whole space, the
    finite-dimensional stand-in for density of a subspace.
    """
    ambient_dim = int(ambient_dim)
    if ambient_dim < 1:
        raise UsageError("ambient dimension must be at least 1")
    if len(basis) > 0 and basis.dim != ambient_dim:
        raise UsageError(
            f"basis vectors live in dimension {basis.dim}, not {ambient_dim}"
        )
    rank = len(orthonormalize(basis)) if len(basis) > 0 else 0
    return ambient_dim - rank


def vectors_from_rows(rows: Iterable[Sequence[float]], weight: float = 1.0) -> SubspaceBasis:
    """Convenience: build a SubspaceBasis from an iterable of coefficient rows."""
    return SubspaceBasis(tuple(HVector(np.asarray(r, dtype=float), weight) for r in rows))
