"""
Unit tests for seeded instance generation.
"""
import unittest

import numpy as np
from pydantic import ValidationError

from src.generators.instance_generator import (
    PRNG_ALGORITHM, ScrambleFactory, make_rng, random_nonsingular, random_synthesis_spec,
    random_unitary, synthesize,
)
from src.models.config import FormKind, RankPolicy, ScrambleMode, SynthesisSpec
from src.models.errors import InvalidFormError, PreconditionError, UnsupportedError
from src.numkit.backends import (
    ComplexFloatBackend, GaussianRationalBackend, RationalBackend, RealFloatBackend,
)
from src.numkit.linalg import jordan_block, matrices_match, rank_of, unitary_defect
from src.regengine.engine import regularize


class TestRandomMatrices(unittest.TestCase):
    """Test cases for random nonsingular and unitary matrices."""

    def test_nonsingular_empty(self):
        """Test a nonsingular matrix of size zero."""
        self.assertEqual(random_nonsingular(0, 1, RationalBackend()).shape, (0, 0))

    def test_nonsingular_rank(self):
        """Test random nonsingular matrices have full rank."""
        for backend in (RationalBackend(), GaussianRationalBackend(), RealFloatBackend()):
            A = random_nonsingular(5, 9, backend)
            self.assertEqual(rank_of(A, backend).rank, 5)

    def test_exact_entries_bounded(self):
        """Test exact entries stay within bounds."""
        backend = RationalBackend()
        A = random_nonsingular(4, 2, backend, entry_bound=2)
        self.assertTrue(all(abs(x) <= 2 and x.denominator == 1 for x in A.flat))

    def test_nonsingular_deterministic(self):
        """Test nonsingular matrices are seed deterministic."""
        backend = RationalBackend()
        self.assertTrue(matrices_match(random_nonsingular(4, 77, backend),
                                       random_nonsingular(4, 77, backend), backend, 0.0))
        floating = ComplexFloatBackend()
        np.testing.assert_array_equal(random_nonsingular(4, 77, floating),
                                      random_nonsingular(4, 77, floating))

    def test_float_condition_guard(self):
        """Test the float condition guard."""
        A = random_nonsingular(6, 3, RealFloatBackend())
        self.assertLess(np.linalg.cond(A), 1e6)

    def test_unitary(self):
        """Test random unitary matrices are unitary."""
        for backend in (RealFloatBackend(), ComplexFloatBackend()):
            U = random_unitary(3, 5, backend)
            self.assertLessEqual(unitary_defect(U, backend), 1e-12)
            np.testing.assert_array_equal(U, random_unitary(3, 5, backend))

    def test_one_by_one_orthogonal(self):
        """Test a one by one orthogonal matrix."""
        for seed in range(10):
            U = random_unitary(1, seed, RealFloatBackend())
            self.assertIn(float(U[0, 0]), (1.0, -1.0))

    def test_exact_unitary_unsupported(self):
        """Test exact unitary generation is unsupported."""
        with self.assertRaises(UnsupportedError):
            random_unitary(2, 0, RationalBackend())


class TestSynthesize(unittest.TestCase):
    """Test cases for synthesize."""

    def setUp(self):
        self.backend = RationalBackend()

    def test_unscrambled_jordan(self):
        """Test an unscrambled Jordan instance."""
        A, truth = synthesize(SynthesisSpec(regular_size=0, blocks=[2]), FormKind.BILINEAR, self.backend)
        self.assertTrue(matrices_match(A, jordan_block(2, self.backend), self.backend, 0.0))
        self.assertEqual(truth.regular_size, 0)
        self.assertEqual(truth.blocks, [2])

    def test_supplied_regular_part(self):
        """Test a supplied regular part is used."""
        spec = SynthesisSpec(regular_size=1, blocks=[1])
        A, truth = synthesize(spec, FormKind.BILINEAR, self.backend, regular=self.backend.from_rows([[3]]))
        self.assertTrue(matrices_match(A, self.backend.from_rows([[3, 0], [0, 0]]), self.backend, 0.0))
        self.assertTrue(matrices_match(truth.regular, self.backend.from_rows([[3]]), self.backend, 0.0))
        self.assertEqual(truth.blocks, [1])

    def test_singular_regular_part_rejected(self):
        """Test a singular regular part is rejected."""
        with self.assertRaises(PreconditionError):
            synthesize(SynthesisSpec(regular_size=1), FormKind.BILINEAR, self.backend,
                       regular=self.backend.zeros(1, 1))

    def test_regular_part_size_checked(self):
        """Test the regular part size is checked."""
        with self.assertRaises(PreconditionError):
            synthesize(SynthesisSpec(regular_size=2), FormKind.BILINEAR, self.backend,
                       regular=self.backend.eye(1))

    def test_sesquilinear_needs_complex_field(self):
        """Test sesquilinear synthesis needs a complex field."""
        with self.assertRaises(InvalidFormError):
            synthesize(SynthesisSpec(blocks=[1]), FormKind.SESQUILINEAR, self.backend)

    def test_blocks_sorted_descending(self):
        """Test block sizes are sorted descending."""
        spec = SynthesisSpec(blocks=[1, 3, 2])
        self.assertEqual(spec.blocks, [3, 2, 1])
        self.assertEqual(spec.total_size, 6)

    def test_invalid_specs(self):
        """Test invalid synthesis specs are rejected."""
        with self.assertRaises(ValidationError):
            SynthesisSpec(blocks=[0])
        with self.assertRaises(ValidationError):
            SynthesisSpec(regular_size=-1)
        with self.assertRaises(ValidationError):
            SynthesisSpec(seed=2 ** 64)

    def test_deterministic(self):
        """Test synthesis is seed deterministic."""
        spec = SynthesisSpec(regular_size=2, blocks=[3, 1], scramble=ScrambleMode.GENERAL, seed=123)
        first, _ = synthesize(spec, FormKind.BILINEAR, self.backend)
        second, _ = synthesize(spec, FormKind.BILINEAR, self.backend)
        self.assertTrue(matrices_match(first, second, self.backend, 0.0))

    def test_general_scramble_recovered(self):
        """Test a general scramble is recovered."""
        spec = SynthesisSpec(regular_size=2, blocks=[3, 1, 1], scramble=ScrambleMode.GENERAL, seed=9)
        A, truth = synthesize(spec, FormKind.BILINEAR, self.backend)
        decomposition, _ = regularize(A, FormKind.BILINEAR, self.backend)
        self.assertEqual(decomposition.blocks, truth.blocks)
        self.assertEqual(decomposition.regular_size, 2)
        self.assertEqual(decomposition.m_sequence, truth.m_sequence)

    def test_unitary_scramble_recovered(self):
        """Test a unitary scramble is recovered."""
        backend = ComplexFloatBackend()
        policy = RankPolicy(tol_scale=100)
        for seed in range(10):
            spec = SynthesisSpec(regular_size=2, blocks=[4, 2, 1], scramble=ScrambleMode.UNITARY, seed=seed)
            A, truth = synthesize(spec, FormKind.SESQUILINEAR, backend)
            decomposition, trace = regularize(A, FormKind.SESQUILINEAR, backend, policy)
            self.assertGreater(trace.min_margin, policy.margin_factor)
            self.assertEqual(decomposition.blocks, truth.blocks)
            self.assertEqual(decomposition.regular_size, 2)

    def test_random_synthesis_spec_within_bounds(self):
        """Test random synthesis specs stay within bounds."""
        rng = make_rng(0)
        for _ in range(50):
            spec = random_synthesis_spec(rng, 8, ScrambleMode.GENERAL)
            self.assertLessEqual(spec.total_size, 8)
            self.assertEqual(spec.scramble, ScrambleMode.GENERAL)


class TestScrambleFactory(unittest.TestCase):

    def test_available_modes(self):
        """Test the available scramble modes."""
        self.assertEqual(set(ScrambleFactory.get_available_modes()), set(ScrambleMode))

    def test_identity_scramble(self):
        """Test the identity scramble."""
        backend = RationalBackend()
        T = ScrambleFactory.create_scramble(ScrambleMode.NONE).transform(3, 0, backend, 3)
        self.assertTrue(matrices_match(T, backend.eye(3), backend, 0.0))

    def test_prng_identifier(self):
        """Test the PRNG identifier."""
        self.assertEqual(PRNG_ALGORITHM, "numpy.PCG64")
        self.assertIsInstance(make_rng(1).bit_generator, np.random.PCG64)


if __name__ == '__main__':
    unittest.main()
