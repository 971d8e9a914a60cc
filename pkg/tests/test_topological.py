"""
Unit tests for the topological (*)congruence classifier and subspace invariants.
"""
import unittest

import numpy as np

from src.generators.instance_generator import make_rng, random_integer_matrix, random_nonsingular
from src.models.config import FormKind, RankPolicy
from src.models.errors import DomainError, ShapeError
from src.models.results import VerdictTag
from src.numkit.backends import GaussianRationalBackend, RationalBackend, RealFloatBackend
from src.numkit.linalg import congruence, direct_sum, jordan_block
from src.classify.topological import (
    check_congruence_witness, compare, k_subspace_dim, left_kernel_dim, subspace_report,
)
from src.regengine.engine import assemble_decomposition, regularize


class TestSubspaces(unittest.TestCase):
    """Test cases for dim L and dim K."""

    def setUp(self):
        self.backend = RationalBackend()

    def test_left_kernel_examples(self):
        """Test left kernel dimensions on examples."""
        self.assertEqual(left_kernel_dim(self.backend.zeros(3, 3), FormKind.BILINEAR, self.backend), 3)
        self.assertEqual(left_kernel_dim(jordan_block(2, self.backend), FormKind.BILINEAR, self.backend), 1)
        self.assertEqual(left_kernel_dim(self.backend.eye(5), FormKind.BILINEAR, self.backend), 0)

    def test_k_subspace_examples(self):
        """Test K-subspace dimensions on examples."""
        self.assertEqual(k_subspace_dim(self.backend.zeros(3, 3), FormKind.BILINEAR, self.backend), 3)
        self.assertEqual(k_subspace_dim(jordan_block(2, self.backend), FormKind.BILINEAR, self.backend), 1)
        self.assertEqual(k_subspace_dim(self.backend.eye(4), FormKind.BILINEAR, self.backend), 4)

    def test_cross_check_with_first_step(self):
        """Test the dimensions against the first reduction step."""
        rng = make_rng(31)
        for _ in range(40):
            n = int(rng.integers(1, 7))
            A = random_integer_matrix(rng, n, self.backend)
            _, trace = regularize(A, FormKind.BILINEAR, self.backend)
            report = subspace_report(A, FormKind.BILINEAR, self.backend)
            if not trace.steps:
                self.assertEqual(report.dim_L, 0)
                continue
            self.assertEqual(report.dim_L, trace.steps[0].m1)
            self.assertEqual(n - report.dim_K, trace.steps[0].m2)

    def test_sesquilinear_cross_check(self):
        """Test the sesquilinear dimensions against the first step."""
        backend = GaussianRationalBackend()
        rng = make_rng(32)
        for _ in range(25):
            A = random_integer_matrix(rng, int(rng.integers(1, 6)), backend)
            _, trace = regularize(A, FormKind.SESQUILINEAR, backend)
            if not trace.steps:
                continue
            n = A.shape[0]
            self.assertEqual(n - k_subspace_dim(A, FormKind.SESQUILINEAR, backend), trace.steps[0].m2)


class TestCompare(unittest.TestCase):
    """Test cases for compare."""

    def setUp(self):
        self.backend = RationalBackend()

    def test_zero_versus_jordan(self):
        """Test zero versus Jordan forms."""
        verdict = compare(self.backend.zeros(2, 2), jordan_block(2, self.backend),
                          FormKind.BILINEAR, self.backend)
        self.assertEqual(verdict.tag, VerdictTag.NOT_EQUIVALENT)
        self.assertEqual(verdict.violated, "blocks")
        self.assertIn("singular summands differ", verdict.reason)
        self.assertEqual((verdict.summands_a, verdict.summands_b), (2, 1))

    def test_identical_identities(self):
        """Test identical identities are equivalent."""
        verdict = compare(self.backend.eye(3), self.backend.eye(3), FormKind.BILINEAR, self.backend)
        self.assertEqual(verdict.tag, VerdictTag.EQUIVALENT)

    def test_summand_order_is_immaterial(self):
        """Test summand order is immaterial."""
        one = self.backend.from_rows([[1]])
        J2 = jordan_block(2, self.backend)
        verdict = compare(direct_sum([J2, one], self.backend), direct_sum([one, J2], self.backend),
                          FormKind.BILINEAR, self.backend)
        self.assertEqual(verdict.tag, VerdictTag.EQUIVALENT)

    def test_size_mismatch(self):
        """Test forms of different sizes are not equivalent."""
        verdict = compare(self.backend.eye(2), self.backend.eye(3), FormKind.BILINEAR, self.backend)
        self.assertEqual(verdict.tag, VerdictTag.NOT_EQUIVALENT)
        self.assertEqual(verdict.violated, "size")

    def test_regular_size_mismatch(self):
        """Test a regular part size mismatch."""
        A = direct_sum([self.backend.eye(2), self.backend.zeros(2, 2)], self.backend)
        B = direct_sum([self.backend.eye(3), self.backend.zeros(1, 1)], self.backend)
        verdict = compare(A, B, FormKind.BILINEAR, self.backend)
        self.assertEqual(verdict.tag, VerdictTag.NOT_EQUIVALENT)

    def test_witness_upgrade(self):
        """Test a witness upgrades the verdict."""
        A, B = self.backend.from_rows([[1]]), self.backend.from_rows([[4]])
        self.assertEqual(compare(A, B, FormKind.BILINEAR, self.backend).tag,
                         VerdictTag.REDUCED_TO_REGULAR_PARTS)
        verdict = compare(A, B, FormKind.BILINEAR, self.backend, witness=self.backend.from_rows([[2]]))
        self.assertEqual(verdict.tag, VerdictTag.EQUIVALENT)
        self.assertTrue(verdict.witness_checked)

    def test_failed_witness_stays_reduced(self):
        """Test a failed witness leaves the reduced verdict."""
        A, B = self.backend.from_rows([[1]]), self.backend.from_rows([[4]])
        verdict = compare(A, B, FormKind.BILINEAR, self.backend, witness=self.backend.from_rows([[3]]))
        self.assertEqual(verdict.tag, VerdictTag.REDUCED_TO_REGULAR_PARTS)
        self.assertIsNotNone(verdict.regular_a)

    def test_mixed_scalar_specs(self):
        """Test mixed scalar specs are rejected."""
        with self.assertRaises(DomainError):
            compare(self.backend.eye(2), np.eye(2), FormKind.BILINEAR, self.backend)

    def test_reflexive_and_symmetric(self):
        """Test comparison is reflexive and symmetric."""
        rng = make_rng(41)
        floating = RealFloatBackend()
        policy = RankPolicy(tol_scale=100)
        for seed in range(20):
            n = int(rng.integers(1, 6))
            A = random_integer_matrix(rng, n, self.backend)
            B = random_integer_matrix(rng, n, self.backend)
            self.assertEqual(compare(A, A, FormKind.BILINEAR, self.backend).tag, VerdictTag.EQUIVALENT)
            self.assertEqual(compare(A, B, FormKind.BILINEAR, self.backend).tag,
                             compare(B, A, FormKind.BILINEAR, self.backend).tag)
            A_float, B_float = floating.convert(A, self.backend), floating.convert(B, self.backend)
            self.assertEqual(compare(A_float, A_float, FormKind.BILINEAR, floating, policy).tag,
                             VerdictTag.EQUIVALENT)
            self.assertEqual(compare(A_float, B_float, FormKind.BILINEAR, floating, policy, tol=1e-3).tag,
                             compare(B_float, A_float, FormKind.BILINEAR, floating, policy, tol=1e-3).tag)

    def test_float_regular_part_tolerance_is_symmetric(self):
        """Test the float regular part tolerance is symmetric."""
        backend = RealFloatBackend()
        A, B = np.array([[1.0]]), np.array([[1.002000001]])
        forward = compare(A, B, FormKind.BILINEAR, backend, tol=1e-3)
        backward = compare(B, A, FormKind.BILINEAR, backend, tol=1e-3)
        self.assertEqual(forward.tag, VerdictTag.EQUIVALENT)
        self.assertEqual(backward.tag, VerdictTag.EQUIVALENT)

    def test_float_warnings_reach_verdict(self):
        """Test float rank warnings reach the verdict."""
        backend = RealFloatBackend()
        A = np.diag([1.0, 1e-15])
        with self.assertLogs('src.regengine.engine', level='WARNING'):
            verdict = compare(A, A, FormKind.BILINEAR, backend)
        self.assertTrue(any(w.startswith("A: ill-conditioned") for w in verdict.warnings))
        self.assertTrue(any(w.startswith("B: ill-conditioned") for w in verdict.warnings))
        self.assertEqual(compare(np.eye(2), np.eye(2), FormKind.BILINEAR, backend).warnings, [])

    def test_scrambled_copy_never_not_equivalent(self):
        """Test a scrambled copy is never inequivalent."""
        rng = make_rng(43)
        for seed in range(20):
            n = int(rng.integers(1, 6))
            A = random_integer_matrix(rng, n, self.backend)
            T = random_nonsingular(n, seed, self.backend)
            verdict = compare(A, congruence(T, A, FormKind.BILINEAR, self.backend),
                              FormKind.BILINEAR, self.backend)
            self.assertNotEqual(verdict.tag, VerdictTag.NOT_EQUIVALENT)
            d, _ = regularize(A, FormKind.BILINEAR, self.backend)
            verdict = compare(assemble_decomposition(d, self.backend), A, FormKind.BILINEAR, self.backend)
            self.assertNotEqual(verdict.tag, VerdictTag.NOT_EQUIVALENT)

    def test_float_backend(self):
        """Test comparison on a float backend."""
        backend = RealFloatBackend()
        verdict = compare(np.zeros((2, 2)), np.array([[0.0, 1.0], [0.0, 0.0]]), FormKind.BILINEAR,
                          backend, RankPolicy())
        self.assertEqual(verdict.tag, VerdictTag.NOT_EQUIVALENT)


class TestCongruenceWitness(unittest.TestCase):
    """Test cases for check_congruence_witness."""

    def test_bilinear_scalar(self):
        """Test a bilinear scalar witness."""
        backend = RationalBackend()
        self.assertTrue(check_congruence_witness(backend.from_rows([[1]]), backend.from_rows([[4]]),
                                                 backend.from_rows([[2]]), FormKind.BILINEAR, backend))

    def test_identity_sesquilinear(self):
        """Test the identity witness for a sesquilinear form."""
        backend = GaussianRationalBackend()
        I = backend.eye(2)
        self.assertTrue(check_congruence_witness(I, I, I, FormKind.SESQUILINEAR, backend))

    def test_sesquilinear_negative(self):
        """Test a wrong sesquilinear witness."""
        backend = GaussianRationalBackend()
        self.assertFalse(check_congruence_witness(backend.from_rows([[1]]), backend.from_rows([[-1]]),
                                                  backend.from_rows([[1j]]), FormKind.SESQUILINEAR, backend))

    def test_singular_witness(self):
        """Test a singular witness is rejected."""
        backend = RationalBackend()
        self.assertFalse(check_congruence_witness(backend.zeros(1, 1), backend.zeros(1, 1),
                                                  backend.zeros(1, 1), FormKind.BILINEAR, backend))

    def test_size_mismatch(self):
        """Test a witness size mismatch."""
        backend = RationalBackend()
        with self.assertRaises(ShapeError):
            check_congruence_witness(backend.eye(2), backend.eye(2), backend.eye(3),
                                     FormKind.BILINEAR, backend)


if __name__ == '__main__':
    unittest.main()
