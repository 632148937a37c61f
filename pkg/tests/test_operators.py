import math

import numpy as np
import pytest

from monores.errors import UsageError
from monores.linalg import HVector, TridiagonalSystem, inner_product, norm
from monores.operators import (
    Diagonal,
    Laplacian1D,
    Laplacian2D,
    Multiplication,
    RightShift,
    SpdMatrix,
    apply,
    apply_system,
    assemble_shifted,
    laplacian_eigenpair,
    monotonicity_certificate,
    natural_weight,
    operator_from_json,
    operator_norm_estimate,
    operator_to_json,
    rayleigh_quotient,
    unboundedness_probe,
)

RNG = np.random.default_rng(2024)


def all_kinds():
    b = RNG.standard_normal((6, 6))
    return [
        SpdMatrix(b @ b.T),
        Diagonal.default(7),
        Multiplication(RNG.uniform(0.0, 2.0, 8)),
        RightShift(6),
        Laplacian1D(9),
        Laplacian2D(4, 3),
    ]


def random_vec(op, rng):
    return HVector(rng.standard_normal(op.dim), natural_weight(op))


class TestApply:
    def test_diagonal_scales_basis_vector(self):
        # the n-th slot of the default family is multiplied by n
        op = Diagonal.default(5)
        u = HVector.basis(2, 5)
        np.testing.assert_array_equal(apply(op, u).coeffs, 3.0 * u.coeffs)

    def test_right_shift(self):
        op = RightShift(3)
        np.testing.assert_array_equal(apply(op, HVector([1, 2, 3])).coeffs, [0, 1, 2])

    def test_stencil_matches_direct_evaluation(self):
        """1-D stencil against an index-by-index evaluation with zero ghosts."""
        op = Laplacian1D(3)
        h = 0.25
        u = HVector(np.sin(np.pi * np.array([0.25, 0.5, 0.75])), h)
        got = apply(op, u).coeffs
        padded = np.concatenate([[0.0], u.coeffs, [0.0]])
        oracle = np.array(
            [(-padded[j - 1] + 2 * padded[j] - padded[j + 1]) / h**2 for j in (1, 2, 3)]
        )
        np.testing.assert_allclose(got, oracle, rtol=1e-14)
        mu = (2 - 2 * np.cos(np.pi * 0.25)) / 0.25**2
        np.testing.assert_allclose(got, mu * u.coeffs, rtol=1e-12)

    def test_stencil_2d_matches_direct_evaluation(self):
        op = Laplacian2D(4, 3)
        rng = np.random.default_rng(5)
        u = random_vec(op, rng)
        got = apply(op, u).coeffs.reshape(3, 4)
        g = np.pad(u.coeffs.reshape(3, 4), 1)
        oracle = np.empty((3, 4))
        for iy in range(3):
            for ix in range(4):
                y, x = iy + 1, ix + 1
                oracle[iy, ix] = (
                    (2 * g[y, x] - g[y, x - 1] - g[y, x + 1]) / op.hx**2
                    + (2 * g[y, x] - g[y - 1, x] - g[y + 1, x]) / op.hy**2
                )
        np.testing.assert_allclose(got, oracle, rtol=1e-13)

    def test_linearity_all_kinds(self):
        rng = np.random.default_rng(1)
        for op in all_kinds():
            u, v = random_vec(op, rng), random_vec(op, rng)
            a, b = rng.standard_normal(2)
            lhs = apply(op, a * u + b * v)
            rhs = a * apply(op, u) + b * apply(op, v)
            assert norm(lhs - rhs) <= 1e-12 * max(1.0, norm(lhs))

    def test_laplacian_symmetry(self):
        rng = np.random.default_rng(3)
        for op in (Laplacian1D(12), Laplacian2D(5, 4)):
            u, v = random_vec(op, rng), random_vec(op, rng)
            lhs = inner_product(apply(op, u), v)
            rhs = inner_product(u, apply(op, v))
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def test_dimension_mismatch(self):
        with pytest.raises(UsageError):
            apply(Diagonal.default(3), HVector([1, 2]))

    def test_grid_weight_enforced(self):
        with pytest.raises(UsageError):
            apply(Laplacian1D(3), HVector([1, 2, 3], weight=1.0))


class TestAssembleShifted:
    def test_diagonal_shift(self):
        sys = assemble_shifted(Diagonal.default(4), 1.0)
        np.testing.assert_array_equal(sys, [2.0, 3.0, 4.0, 5.0])

    def test_stencil_bands(self):
        sys = assemble_shifted(Laplacian1D(3), 0.1)
        assert isinstance(sys, TridiagonalSystem)
        h2 = 0.25**2
        np.testing.assert_allclose(sys.diag, 1 + 2 * 0.1 / h2)
        np.testing.assert_allclose(sys.sub, -0.1 / h2)
        np.testing.assert_allclose(sys.sup, -0.1 / h2)

    def test_spd_shift_entrywise(self):
        b = np.array([[2.0, 1.0], [1.0, 2.0]])
        sys = assemble_shifted(SpdMatrix(b), 2.0)
        np.testing.assert_array_equal(sys, np.eye(2) + 2.0 * b)

    def test_consistency_with_apply(self):
        """system * u == u + lam * A u for every kind and shift."""
        rng = np.random.default_rng(9)
        for op in all_kinds():
            for lam in (0.01, 1.0, 100.0):
                sys = assemble_shifted(op, lam)
                u = random_vec(op, rng)
                lhs = apply_system(sys, u)
                rhs = u + lam * apply(op, u)
                assert norm(lhs - rhs) <= 1e-12 * max(1.0, norm(rhs))

    def test_nonpositive_lambda_rejected(self):
        with pytest.raises(UsageError):
            assemble_shifted(Diagonal.default(2), 0.0)


class TestMonotonicityCertificate:
    def test_diagonal_passes_with_floor_one(self):
        rep = monotonicity_certificate(Diagonal.default(6), samples=40, seed=1)
        assert rep.verdict
        assert rep.worst_value >= 1.0 - 1e-12  # smallest weight

    def test_laplacian_passes_above_smallest_eigenvalue(self):
        rep = monotonicity_certificate(Laplacian1D(25), samples=40, seed=1)
        _, mu1 = laplacian_eigenpair(25, 1)
        assert rep.verdict
        assert rep.worst_value >= mu1 * (1 - 1e-12)

    def test_right_shift_hand_witness(self):
        # <S u, u> = u1*u2 = -1 for u=(1,-1); quotient -1/2
        q = rayleigh_quotient(RightShift(2), HVector([1.0, -1.0]))
        assert q == pytest.approx(-0.5, rel=1e-15)

    def test_right_shift_fails(self):
        rep = monotonicity_certificate(RightShift(5), samples=30, seed=7)
        assert not rep.verdict
        assert rep.worst_value < -1e-12

    def test_witness_reproduces_worst_value(self):
        for op in (Diagonal.default(6), RightShift(5), Laplacian1D(10)):
            rep = monotonicity_certificate(op, samples=25, seed=3)
            again = rayleigh_quotient(op, rep.witness)
            assert abs(again - rep.worst_value) <= 1e-12 * max(1.0, abs(rep.worst_value))

    def test_monotone_kinds_pass_any_seed(self):
        rng = np.random.default_rng(0)
        b = rng.standard_normal((5, 5))
        kinds = [
            SpdMatrix(b @ b.T),
            Diagonal.default(6),
            Multiplication(rng.uniform(0.0, 3.0, 7)),
            Laplacian1D(8),
            Laplacian2D(3, 3),
        ]
        for op in kinds:
            for seed in (0, 1, 99):
                assert monotonicity_certificate(op, samples=20, seed=seed).verdict


class TestOperatorNorm:
    def test_right_shift_is_isometry(self):
        assert operator_norm_estimate(RightShift(20), iters=50) == pytest.approx(1.0, abs=1e-10)

    def test_constant_multiplication(self):
        op = Multiplication(np.full(9, 0.5))
        assert operator_norm_estimate(op, iters=10) == pytest.approx(0.5, rel=1e-12)

    def test_diagonal_default_reaches_dimension(self):
        assert operator_norm_estimate(Diagonal.default(50), iters=2000) == pytest.approx(
            50.0, abs=1e-8
        )

    def test_nondecreasing_in_iters(self):
        op = SpdMatrix(np.array([[2.0, 1.0], [1.0, 3.0]]))
        vals = [operator_norm_estimate(op, iters=i) for i in (1, 2, 4, 8, 16)]
        for a, b in zip(vals, vals[1:]):
            assert b >= a - 1e-13

    def test_lower_bound_property(self):
        rng = np.random.default_rng(12)
        b = rng.standard_normal((8, 8))
        op = SpdMatrix(b @ b.T)
        top = float(np.max(np.abs(np.linalg.eigvalsh(op.entries))))
        for iters in (1, 3, 10, 100):
            assert operator_norm_estimate(op, iters) <= top * (1 + 1e-12)


class TestUnboundednessProbe:
    def test_small_table(self):
        assert unboundedness_probe(3) == [(1, 1.0), (2, 2.0), (3, 3.0)]

    def test_single_row(self):
        assert unboundedness_probe(1) == [(1, 1.0)]

    def test_growth_is_exact(self):
        table = unboundedness_probe(10)
        assert table[-1] == (10, 10.0)
        assert [r for _, r in table] == [float(n) for n in range(1, 11)]


class TestLaplacianEigenpair:
    def test_n3_mode1(self):
        v, mu = laplacian_eigenpair(3, 1)
        assert mu == pytest.approx((2 - 2 * math.cos(math.pi / 4)) / 0.0625, rel=1e-15)
        np.testing.assert_allclose(
            apply(Laplacian1D(3), v).coeffs, mu * v.coeffs, rtol=1e-12
        )

    def test_single_node(self):
        v, mu = laplacian_eigenpair(1, 1)
        assert mu == pytest.approx(8.0, rel=1e-15)
        np.testing.assert_allclose(v.coeffs, [1.0])

    def test_top_mode_below_cosine_bound(self):
        for n in (2, 17, 64):
            _, mu = laplacian_eigenpair(n, n)
            assert mu <= 4.0 * (n + 1) ** 2

    @pytest.mark.parametrize("n", [4, 99, 512])
    def test_eigen_residual_all_modes(self, n):
        op = Laplacian1D(n)
        for mode in range(1, n + 1):
            v, mu = laplacian_eigenpair(n, mode)
            assert norm(apply(op, v) - mu * v) <= 1e-10 * mu

    def test_mode_out_of_range(self):
        with pytest.raises(UsageError):
            laplacian_eigenpair(5, 6)
        with pytest.raises(UsageError):
            laplacian_eigenpair(5, 0)


class TestSpecValidation:
    def test_spd_requires_symmetry(self):
        with pytest.raises(UsageError):
            SpdMatrix(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_multiplication_requires_finite(self):
        with pytest.raises(UsageError):
            Multiplication([1.0, float("nan")])

    def test_monotone_expected_flags(self):
        assert Diagonal.default(3).monotone_expected
        assert not Diagonal([1.0, -1.0]).monotone_expected
        assert Multiplication([0.0, 0.5]).monotone_expected
        assert not Multiplication([0.5, -0.5]).monotone_expected
        assert not RightShift(4).monotone_expected
        assert Laplacian1D(4).monotone_expected and Laplacian2D(2, 2).monotone_expected

    def test_dim_consistency(self):
        assert Laplacian2D(5, 3).dim == 15
        assert Diagonal.default(4).dim == 4
        assert RightShift(6).dim == 6

    def test_json_round_trip_all_kinds(self):
        for op in all_kinds():
            again = operator_from_json(operator_to_json(op))
            assert type(again) is type(op)
            assert again.dim == op.dim
            u = HVector(np.arange(1.0, op.dim + 1), natural_weight(op))
            assert norm(apply(again, u) - apply(op, u)) == 0.0

    def test_json_rejects_unknown_kind(self):
        with pytest.raises(UsageError):
            operator_from_json({"kind": "mystery", "params": {}})

    def test_json_rejects_extra_params(self):
        with pytest.raises(UsageError):
            operator_from_json({"kind": "diagonal", "params": {"weights": [1], "x": 2}})
